// Trainable aggregation descriptors over variable-length descriptor
// sequences: NetVLAD, NetRVLAD, SoftDBoW and NetFV.
//
// All four share one soft assignment a_k(x) = softmax_k(w_k . x + b_k) and
// differ in what they accumulate per cluster:
//
//   NetVLAD(j,k)  = sum_i a_k(x_i) (x_i(j) - c_k(j))
//   NetRVLAD(j,k) = sum_i a_k(x_i)  x_i(j)
//   SoftDBoW(k)   = sum_i a_k(x_i)
//   NetFV1(j,k)   = sum_i a_k(x_i) (x_i(j) - c_k(j)) / sigma_k(j)
//   NetFV2(j,k)   = sum_i a_k(x_i) ((x_i(j) - c_k(j))^2 / sigma_k(j)^2 - 1)
//
// Outputs are flattened j-major, k-minor; NetFV concatenates the first-order
// block before the second-order block. sigma is kept positive through
// sigma = floor + softplus(raw), and gradients are reported with respect to
// the raw parameter.
//
// An optional normalization (per-cluster L2 followed by global L2) is off by
// default so raw outputs match the definitional formulas.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "latefuse/common.hpp"

namespace latefuse {

inline constexpr double kSigmaFloor = 1e-3;

inline double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

inline double softplus_inverse(double y) {
    // y > 0; inverse of log1p(exp(x))
    if (y > 30.0) return y;
    return std::log(std::expm1(y));
}

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

struct DescriptorSequence {
    std::size_t dim = 0;
    std::vector<double> data;  // N x dim, row-major

    std::size_t count() const { return dim == 0 ? 0 : data.size() / dim; }

    const double* descriptor(std::size_t i) const { return data.data() + i * dim; }
};

inline DescriptorSequence make_descriptor_sequence(std::size_t dim, std::vector<double> data) {
    if (dim == 0 || data.empty() || data.size() % dim != 0) {
        throw Error(ErrorKind::ShapeMismatch,
                    "descriptor sequence needs N x dim values with dim >= 1, N >= 1");
    }
    require_finite(data, "descriptor sequence");
    return DescriptorSequence{dim, std::move(data)};
}

struct ClusterParams {
    std::size_t dim = 0;       // D
    std::size_t clusters = 0;  // K
    std::vector<double> anchors;         // K x D, c_k(j)
    std::vector<double> assign_weights;  // K x D, w_k(j)
    std::vector<double> assign_bias;     // K, b_k
    std::vector<double> sigma_raw;       // K x D, NetFV scale before softplus

    double sigma(std::size_t k, std::size_t j) const {
        return kSigmaFloor + softplus(sigma_raw[k * dim + j]);
    }

    void set_sigma(std::size_t k, std::size_t j, double value) {
        if (!(value > kSigmaFloor)) {
            throw Error(ErrorKind::InvalidSpec,
                        "sigma must exceed the positivity floor " + format_double(kSigmaFloor));
        }
        sigma_raw[k * dim + j] = softplus_inverse(value - kSigmaFloor);
    }

    void set_all_sigma(double value) {
        for (std::size_t k = 0; k < clusters; ++k) {
            for (std::size_t j = 0; j < dim; ++j) set_sigma(k, j, value);
        }
    }
};

// Zero anchors/weights/bias (uniform assignment), sigma = 1.
inline ClusterParams make_cluster_params(std::size_t dim, std::size_t clusters) {
    if (dim == 0 || clusters == 0) {
        throw Error(ErrorKind::InvalidSpec, "cluster params need dim >= 1 and clusters >= 1");
    }
    ClusterParams p;
    p.dim = dim;
    p.clusters = clusters;
    p.anchors.assign(clusters * dim, 0.0);
    p.assign_weights.assign(clusters * dim, 0.0);
    p.assign_bias.assign(clusters, 0.0);
    p.sigma_raw.assign(clusters * dim, 0.0);
    p.set_all_sigma(1.0);
    return p;
}

inline void validate_params(const ClusterParams& p) {
    if (p.dim == 0 || p.clusters == 0 || p.anchors.size() != p.clusters * p.dim ||
        p.assign_weights.size() != p.clusters * p.dim || p.assign_bias.size() != p.clusters ||
        p.sigma_raw.size() != p.clusters * p.dim) {
        throw Error(ErrorKind::ShapeMismatch, "cluster parameter shapes are inconsistent");
    }
    require_finite(p.anchors, "anchors");
    require_finite(p.assign_weights, "assignment weights");
    require_finite(p.assign_bias, "assignment bias");
    require_finite(p.sigma_raw, "sigma");
}

enum class AggKind { NetVLAD, NetRVLAD, SoftDBoW, NetFV };

inline constexpr std::array<AggKind, 4> kAllAggKinds = {AggKind::NetVLAD, AggKind::NetRVLAD,
                                                        AggKind::SoftDBoW, AggKind::NetFV};

inline std::string_view agg_kind_name(AggKind kind) {
    switch (kind) {
        case AggKind::NetVLAD: return "netvlad";
        case AggKind::NetRVLAD: return "netrvlad";
        case AggKind::SoftDBoW: return "softdbow";
        default: return "netfv";
    }
}

inline AggKind parse_agg_kind(std::string_view name) {
    for (AggKind k : kAllAggKinds) {
        if (agg_kind_name(k) == name) return k;
    }
    throw Error(ErrorKind::BadData, "unknown aggregation kind '" + std::string(name) + "'");
}

inline std::size_t output_dim(AggKind kind, std::size_t dim, std::size_t clusters) {
    switch (kind) {
        case AggKind::NetVLAD:
        case AggKind::NetRVLAD: return dim * clusters;
        case AggKind::SoftDBoW: return clusters;
        default: return 2 * dim * clusters;
    }
}

struct AggOptions {
    // Per-cluster L2 followed by global L2 on the flattened output.
    bool normalize = false;
};

// Softmax over clusters of the affine scores w_k . x + b_k, max-subtracted.
inline std::vector<double> soft_assign(const double* x, const ClusterParams& params) {
    const std::size_t K = params.clusters;
    std::vector<double> a(K);
    double max_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
        double s = params.assign_bias[k];
        for (std::size_t j = 0; j < params.dim; ++j) {
            s += params.assign_weights[k * params.dim + j] * x[j];
        }
        if (!std::isfinite(s)) {
            throw Error(ErrorKind::NonFiniteInput, "assignment score is not finite");
        }
        a[k] = s;
        max_score = std::max(max_score, s);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        a[k] = std::exp(a[k] - max_score);
        total += a[k];
    }
    for (std::size_t k = 0; k < K; ++k) a[k] /= total;
    return a;
}

inline std::vector<double> soft_assign(const std::vector<double>& x, const ClusterParams& params) {
    if (x.size() != params.dim) {
        throw Error(ErrorKind::ShapeMismatch, "descriptor dim " + std::to_string(x.size()) +
                                                  " vs params dim " + std::to_string(params.dim));
    }
    require_finite(x, "descriptor");
    return soft_assign(x.data(), params);
}

namespace detail {

// N x K assignment matrix.
inline std::vector<double> assignments(const DescriptorSequence& seq,
                                       const ClusterParams& params) {
    const std::size_t n = seq.count();
    std::vector<double> a(n * params.clusters);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> ai = soft_assign(seq.descriptor(i), params);
        std::copy(ai.begin(), ai.end(), a.begin() + i * params.clusters);
    }
    return a;
}

inline std::vector<double> raw_forward(AggKind kind, const DescriptorSequence& seq,
                                       const ClusterParams& params,
                                       const std::vector<double>& assign) {
    const std::size_t n = seq.count();
    const std::size_t D = params.dim;
    const std::size_t K = params.clusters;
    std::vector<double> out(output_dim(kind, D, K), 0.0);
    switch (kind) {
        case AggKind::NetVLAD:
            for (std::size_t i = 0; i < n; ++i) {
                const double* x = seq.descriptor(i);
                for (std::size_t k = 0; k < K; ++k) {
                    const double a = assign[i * K + k];
                    for (std::size_t j = 0; j < D; ++j) {
                        out[j * K + k] += a * (x[j] - params.anchors[k * D + j]);
                    }
                }
            }
            break;
        case AggKind::NetRVLAD:
            for (std::size_t i = 0; i < n; ++i) {
                const double* x = seq.descriptor(i);
                for (std::size_t k = 0; k < K; ++k) {
                    const double a = assign[i * K + k];
                    for (std::size_t j = 0; j < D; ++j) out[j * K + k] += a * x[j];
                }
            }
            break;
        case AggKind::SoftDBoW:
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < K; ++k) out[k] += assign[i * K + k];
            }
            break;
        case AggKind::NetFV:
            for (std::size_t i = 0; i < n; ++i) {
                const double* x = seq.descriptor(i);
                for (std::size_t k = 0; k < K; ++k) {
                    const double a = assign[i * K + k];
                    for (std::size_t j = 0; j < D; ++j) {
                        const double s = params.sigma(k, j);
                        const double r = x[j] - params.anchors[k * D + j];
                        out[j * K + k] += a * r / s;
                        out[D * K + j * K + k] += a * (r * r / (s * s) - 1.0);
                    }
                }
            }
            break;
    }
    return out;
}

// Index groups for per-cluster normalization blocks.
inline std::vector<std::vector<std::size_t>> cluster_blocks(AggKind kind, std::size_t D,
                                                            std::size_t K) {
    std::vector<std::vector<std::size_t>> blocks;
    if (kind == AggKind::SoftDBoW) return blocks;  // scalar per cluster, global L2 only
    const std::size_t halves = (kind == AggKind::NetFV) ? 2 : 1;
    for (std::size_t h = 0; h < halves; ++h) {
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<std::size_t> block;
            block.reserve(D);
            for (std::size_t j = 0; j < D; ++j) block.push_back(h * D * K + j * K + k);
            blocks.push_back(std::move(block));
        }
    }
    return blocks;
}

inline constexpr double kNormFloor = 1e-12;

inline double l2_norm(const std::vector<double>& v, const std::vector<std::size_t>* idx) {
    double s = 0.0;
    if (idx) {
        for (std::size_t i : *idx) s += v[i] * v[i];
    } else {
        for (double x : v) s += x * x;
    }
    return std::sqrt(s);
}

inline void apply_normalization(AggKind kind, std::size_t D, std::size_t K,
                                std::vector<double>& out) {
    for (const auto& block : cluster_blocks(kind, D, K)) {
        const double norm = l2_norm(out, &block);
        if (norm > kNormFloor) {
            for (std::size_t i : block) out[i] /= norm;
        }
    }
    const double norm = l2_norm(out, nullptr);
    if (norm > kNormFloor) {
        for (double& v : out) v /= norm;
    }
}

// Pulls an upstream gradient back through v -> v / ||v|| at the point v.
inline void l2_backward(const std::vector<double>& v, std::vector<double>& grad,
                        const std::vector<std::size_t>* idx) {
    const double norm = l2_norm(v, idx);
    if (norm <= kNormFloor) return;  // normalization was skipped in forward
    double dot = 0.0;
    if (idx) {
        for (std::size_t i : *idx) dot += grad[i] * (v[i] / norm);
        for (std::size_t i : *idx) grad[i] = (grad[i] - dot * (v[i] / norm)) / norm;
    } else {
        for (std::size_t i = 0; i < v.size(); ++i) dot += grad[i] * (v[i] / norm);
        for (std::size_t i = 0; i < v.size(); ++i) {
            grad[i] = (grad[i] - dot * (v[i] / norm)) / norm;
        }
    }
}

}  // namespace detail

inline std::vector<double> aggregate_forward(AggKind kind, const DescriptorSequence& seq,
                                             const ClusterParams& params,
                                             const AggOptions& options = {}) {
    validate_params(params);
    if (seq.dim != params.dim) {
        throw Error(ErrorKind::ShapeMismatch, "sequence dim " + std::to_string(seq.dim) +
                                                  " vs params dim " + std::to_string(params.dim));
    }
    require_finite(seq.data, "descriptor sequence");
    const std::vector<double> assign = detail::assignments(seq, params);
    std::vector<double> out = detail::raw_forward(kind, seq, params, assign);
    if (options.normalize) {
        detail::apply_normalization(kind, params.dim, params.clusters, out);
    }
    return out;
}

struct AggGradients {
    std::vector<double> descriptors;     // N x D
    std::vector<double> anchors;         // K x D
    std::vector<double> assign_weights;  // K x D
    std::vector<double> assign_bias;     // K
    std::vector<double> sigma_raw;       // K x D, nonzero only for NetFV
};

// Gradients of (upstream . forward output) with respect to the descriptors
// and every parameter group.
inline AggGradients aggregate_backward(AggKind kind, const DescriptorSequence& seq,
                                       const ClusterParams& params,
                                       const std::vector<double>& upstream,
                                       const AggOptions& options = {}) {
    validate_params(params);
    if (seq.dim != params.dim) {
        throw Error(ErrorKind::ShapeMismatch, "sequence dim " + std::to_string(seq.dim) +
                                                  " vs params dim " + std::to_string(params.dim));
    }
    const std::size_t D = params.dim;
    const std::size_t K = params.clusters;
    const std::size_t n = seq.count();
    if (upstream.size() != output_dim(kind, D, K)) {
        throw Error(ErrorKind::ShapeMismatch,
                    "upstream length " + std::to_string(upstream.size()) + " vs output dim " +
                        std::to_string(output_dim(kind, D, K)));
    }
    require_finite(upstream, "upstream gradient");

    const std::vector<double> assign = detail::assignments(seq, params);

    // With normalization on, replay the forward chain and pull the upstream
    // back through global then per-cluster L2 before the raw backward.
    std::vector<double> g = upstream;
    if (options.normalize) {
        const std::vector<double> raw = detail::raw_forward(kind, seq, params, assign);
        std::vector<double> intra = raw;
        const auto blocks = detail::cluster_blocks(kind, D, K);
        for (const auto& block : blocks) {
            const double norm = detail::l2_norm(intra, &block);
            if (norm > detail::kNormFloor) {
                for (std::size_t idx : block) intra[idx] /= norm;
            }
        }
        detail::l2_backward(intra, g, nullptr);
        for (const auto& block : blocks) detail::l2_backward(raw, g, &block);
    }

    AggGradients grads;
    grads.descriptors.assign(n * D, 0.0);
    grads.anchors.assign(K * D, 0.0);
    grads.assign_weights.assign(K * D, 0.0);
    grads.assign_bias.assign(K, 0.0);
    grads.sigma_raw.assign(K * D, 0.0);

    // Per-descriptor sensitivity to its assignment: P(i,k) = dL/da_ik.
    std::vector<double> assign_grad(n * K, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const double* x = seq.descriptor(i);
        for (std::size_t k = 0; k < K; ++k) {
            const double a = assign[i * K + k];
            double p = 0.0;
            for (std::size_t j = 0; j < D; ++j) {
                switch (kind) {
                    case AggKind::NetVLAD: {
                        const double gv = g[j * K + k];
                        p += gv * (x[j] - params.anchors[k * D + j]);
                        grads.descriptors[i * D + j] += gv * a;
                        break;
                    }
                    case AggKind::NetRVLAD: {
                        const double gv = g[j * K + k];
                        p += gv * x[j];
                        grads.descriptors[i * D + j] += gv * a;
                        break;
                    }
                    case AggKind::SoftDBoW:
                        break;
                    case AggKind::NetFV: {
                        const double g1 = g[j * K + k];
                        const double g2 = g[D * K + j * K + k];
                        const double s = params.sigma(k, j);
                        const double r = x[j] - params.anchors[k * D + j];
                        p += g1 * r / s + g2 * (r * r / (s * s) - 1.0);
                        const double direct = g1 / s + 2.0 * g2 * r / (s * s);
                        grads.descriptors[i * D + j] += a * direct;
                        grads.anchors[k * D + j] -= a * direct;
                        const double dsigma = -g1 * r / (s * s) - 2.0 * g2 * r * r / (s * s * s);
                        grads.sigma_raw[k * D + j] +=
                            a * dsigma * sigmoid(params.sigma_raw[k * D + j]);
                        break;
                    }
                }
            }
            if (kind == AggKind::SoftDBoW) p = g[k];
            assign_grad[i * K + k] = p;
        }
    }

    if (kind == AggKind::NetVLAD) {
        // d/dc_k(j) of sum_i a_ik (x_ij - c_kj) = -sum_i a_ik
        for (std::size_t k = 0; k < K; ++k) {
            double a_total = 0.0;
            for (std::size_t i = 0; i < n; ++i) a_total += assign[i * K + k];
            for (std::size_t j = 0; j < D; ++j) grads.anchors[k * D + j] -= g[j * K + k] * a_total;
        }
    }

    // Softmax jacobian: q_ik = a_ik (P_ik - sum_m a_im P_im), then the affine
    // score chain gives the w, b and remaining x gradients.
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = seq.descriptor(i);
        double mean_p = 0.0;
        for (std::size_t k = 0; k < K; ++k) mean_p += assign[i * K + k] * assign_grad[i * K + k];
        for (std::size_t k = 0; k < K; ++k) {
            const double q = assign[i * K + k] * (assign_grad[i * K + k] - mean_p);
            grads.assign_bias[k] += q;
            for (std::size_t j = 0; j < D; ++j) {
                grads.assign_weights[k * D + j] += q * x[j];
                grads.descriptors[i * D + j] += q * params.assign_weights[k * D + j];
            }
        }
    }
    return grads;
}

struct LabeledSequence {
    std::string id;
    DescriptorSequence seq;
    int label = 0;  // class index 0..6
};

struct EpochMetrics {
    double loss = 0.0;
    double accuracy = 0.0;
};

struct LinearHead {
    std::size_t input_dim = 0;
    std::vector<double> weights;  // 7 x input_dim
    std::vector<double> bias;     // 7
};

struct ToyTrainResult {
    std::vector<EpochMetrics> history;  // entry 0 is the untrained state
    ClusterParams params;
    LinearHead head;
};

namespace detail {

inline std::array<double, kNumClasses> head_logits(const LinearHead& head,
                                                   const std::vector<double>& features) {
    std::array<double, kNumClasses> logits{};
    for (int c = 0; c < kNumClasses; ++c) {
        double s = head.bias[c];
        const double* w = head.weights.data() + static_cast<std::size_t>(c) * head.input_dim;
        for (std::size_t v = 0; v < head.input_dim; ++v) s += w[v] * features[v];
        logits[c] = s;
    }
    return logits;
}

// Returns (cross-entropy loss, class probabilities).
inline double softmax_xent(const std::array<double, kNumClasses>& logits, int label,
                           std::array<double, kNumClasses>& probs) {
    double max_logit = logits[0];
    for (double v : logits) max_logit = std::max(max_logit, v);
    double total = 0.0;
    for (int c = 0; c < kNumClasses; ++c) {
        probs[c] = std::exp(logits[c] - max_logit);
        total += probs[c];
    }
    for (int c = 0; c < kNumClasses; ++c) probs[c] /= total;
    return std::log(total) + max_logit - logits[label];
}

}  // namespace detail

// Deterministic SGD on cross-entropy of softmax(head(aggregate(seq))). Every
// epoch visits the full dataset once in a seed-fixed shuffled order; the
// metric history starts with the untrained state, so with a zero-initialized
// head history[0].loss is ln 7.
inline ToyTrainResult train_toy(AggKind kind, const std::vector<LabeledSequence>& data,
                                std::size_t clusters, int epochs, double learning_rate,
                                std::uint64_t seed, const AggOptions& options = {}) {
    if (data.empty()) throw Error(ErrorKind::EmptyDataset, "cannot train on an empty dataset");
    if (learning_rate < 0.0 || !std::isfinite(learning_rate)) {
        throw Error(ErrorKind::InvalidSpec, "learning rate must be finite and >= 0");
    }
    if (epochs < 0) throw Error(ErrorKind::InvalidSpec, "epochs must be >= 0");
    const std::size_t D = data.front().seq.dim;
    for (const auto& s : data) {
        if (s.seq.dim != D) {
            throw Error(ErrorKind::ShapeMismatch, "sequences disagree on descriptor dim");
        }
        if (s.label < 0 || s.label >= kNumClasses) {
            throw Error(ErrorKind::BadData, "label out of range in toy dataset");
        }
    }

    // VLAD-style init: anchors from the first K training descriptors (cycled
    // if the corpus is shorter), w_k = 2 c_k, b_k = -|c_k|^2, sigma = 1.
    ClusterParams params = make_cluster_params(D, clusters);
    {
        std::vector<const double*> pool;
        for (const auto& s : data) {
            for (std::size_t i = 0; i < s.seq.count(); ++i) pool.push_back(s.seq.descriptor(i));
        }
        for (std::size_t k = 0; k < clusters; ++k) {
            const double* c = pool[k % pool.size()];
            double sq = 0.0;
            for (std::size_t j = 0; j < D; ++j) {
                params.anchors[k * D + j] = c[j];
                params.assign_weights[k * D + j] = 2.0 * c[j];
                sq += c[j] * c[j];
            }
            params.assign_bias[k] = -sq;
        }
    }

    LinearHead head;
    head.input_dim = output_dim(kind, D, clusters);
    head.weights.assign(static_cast<std::size_t>(kNumClasses) * head.input_dim, 0.0);
    head.bias.assign(kNumClasses, 0.0);

    const auto evaluate = [&]() {
        EpochMetrics m;
        std::size_t hits = 0;
        for (const auto& s : data) {
            const std::vector<double> agg = aggregate_forward(kind, s.seq, params, options);
            const auto logits = detail::head_logits(head, agg);
            std::array<double, kNumClasses> probs;
            m.loss += detail::softmax_xent(logits, s.label, probs);
            int best = 0;
            for (int c = 1; c < kNumClasses; ++c) {
                if (logits[c] > logits[best]) best = c;
            }
            if (best == s.label) ++hits;
        }
        m.loss /= static_cast<double>(data.size());
        m.accuracy = static_cast<double>(hits) / static_cast<double>(data.size());
        return m;
    };

    ToyTrainResult result;
    result.history.push_back(evaluate());

    SplitMix64 rng(seed);
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t idx : order) {
            const LabeledSequence& s = data[idx];
            const std::vector<double> agg = aggregate_forward(kind, s.seq, params, options);
            const auto logits = detail::head_logits(head, agg);
            std::array<double, kNumClasses> probs;
            detail::softmax_xent(logits, s.label, probs);

            std::array<double, kNumClasses> dlogit = probs;
            dlogit[s.label] -= 1.0;

            std::vector<double> upstream(head.input_dim, 0.0);
            for (int c = 0; c < kNumClasses; ++c) {
                const double* w = head.weights.data() + static_cast<std::size_t>(c) * head.input_dim;
                for (std::size_t v = 0; v < head.input_dim; ++v) upstream[v] += dlogit[c] * w[v];
            }
            const AggGradients grads = aggregate_backward(kind, s.seq, params, upstream, options);

            for (int c = 0; c < kNumClasses; ++c) {
                double* w = head.weights.data() + static_cast<std::size_t>(c) * head.input_dim;
                for (std::size_t v = 0; v < head.input_dim; ++v) {
                    w[v] -= learning_rate * dlogit[c] * agg[v];
                }
                head.bias[c] -= learning_rate * dlogit[c];
            }
            for (std::size_t v = 0; v < params.anchors.size(); ++v) {
                params.anchors[v] -= learning_rate * grads.anchors[v];
                params.assign_weights[v] -= learning_rate * grads.assign_weights[v];
                params.sigma_raw[v] -= learning_rate * grads.sigma_raw[v];
            }
            for (std::size_t k = 0; k < clusters; ++k) {
                params.assign_bias[k] -= learning_rate * grads.assign_bias[k];
            }
        }
        result.history.push_back(evaluate());
    }

    result.params = std::move(params);
    result.head = std::move(head);
    return result;
}

}  // namespace latefuse
