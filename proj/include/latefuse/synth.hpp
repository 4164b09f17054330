// Seeded synthetic data: score-matrix banks with controllable per-model
// accuracy, and two-class descriptor sequences for the toy training task.
// Everything is a pure function of its spec, including the seed; the draw
// order below is part of the contract so fixtures stay byte-identical.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "latefuse/aggregation.hpp"
#include "latefuse/common.hpp"
#include "latefuse/core.hpp"

namespace latefuse {

struct SynthSpec {
    int n_models = 3;
    int n_samples = 100;
    std::vector<double> accuracy;  // per-model target accuracy, size 1 or n_models
    double noise = 0.5;            // logit noise scale s
    double sharpness = 4.0;        // target logit tau
    std::array<double, kNumClasses> prior = {1, 1, 1, 1, 1, 1, 1};  // normalized on use
    double shared_noise = 0.0;     // in [0,1); correlates the models' noise
    std::uint64_t seed = 1;
};

inline void validate_spec(const SynthSpec& spec) {
    if (spec.n_models < 1) throw Error(ErrorKind::InvalidSpec, "models: need >= 1");
    if (spec.n_samples < 1) throw Error(ErrorKind::InvalidSpec, "samples: need >= 1");
    if (spec.accuracy.empty() ||
        (spec.accuracy.size() != 1 &&
         spec.accuracy.size() != static_cast<std::size_t>(spec.n_models))) {
        throw Error(ErrorKind::InvalidSpec, "acc: need one value or one per model");
    }
    for (double p : spec.accuracy) {
        if (!(p > 0.0 && p < 1.0)) {
            throw Error(ErrorKind::InvalidSpec,
                        "acc: target accuracy " + format_double(p) + " outside (0,1)");
        }
    }
    if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise)) {
        throw Error(ErrorKind::InvalidSpec, "noise: need >= 0");
    }
    if (!(spec.sharpness > 0.0) || !std::isfinite(spec.sharpness)) {
        throw Error(ErrorKind::InvalidSpec, "sharpness: need > 0");
    }
    double prior_sum = 0.0;
    for (double p : spec.prior) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw Error(ErrorKind::InvalidSpec, "prior: entries must be >= 0");
        }
        prior_sum += p;
    }
    if (prior_sum <= 0.0) throw Error(ErrorKind::InvalidSpec, "prior: must have positive mass");
    if (!(spec.shared_noise >= 0.0 && spec.shared_noise < 1.0)) {
        throw Error(ErrorKind::InvalidSpec, "shared-noise: need in [0,1)");
    }
}

struct SynthBank {
    ModelBank bank;
    LabeledSet gold;
};

namespace detail {

inline int sample_prior(SplitMix64& rng, const std::array<double, kNumClasses>& prior,
                        double prior_sum) {
    double u = rng.uniform01() * prior_sum;
    for (int c = 0; c < kNumClasses; ++c) {
        u -= prior[c];
        if (u < 0.0) return c;
    }
    return kNumClasses - 1;
}

inline std::string padded_index(const char* prefix, int index, int width) {
    std::string digits = std::to_string(index);
    std::string out = prefix;
    for (int i = static_cast<int>(digits.size()); i < width; ++i) out.push_back('0');
    return out + digits;
}

}  // namespace detail

inline std::string synth_sample_id(int index) { return detail::padded_index("s", index, 5); }

inline std::string synth_model_id(int index) { return detail::padded_index("m", index, 2); }

// Gold labels come from the prior. Per model and sample, the model aims at
// the gold class with its target probability and at a uniformly random wrong
// class otherwise; the row is softmax(tau * onehot(target) + noise).
//
// Draw order (fixed): gold labels; the shared noise block when enabled
// (sample-major); then per model, per sample: the hit draw, the wrong-class
// draw when needed, seven noise values.
inline SynthBank gen_bank(const SynthSpec& spec) {
    validate_spec(spec);
    SplitMix64 rng(spec.seed);

    double prior_sum = 0.0;
    for (double p : spec.prior) prior_sum += p;

    std::vector<std::string> ids;
    std::vector<Emotion> gold;
    ids.reserve(spec.n_samples);
    gold.reserve(spec.n_samples);
    for (int i = 0; i < spec.n_samples; ++i) {
        ids.push_back(synth_sample_id(i));
        gold.push_back(static_cast<Emotion>(detail::sample_prior(rng, spec.prior, prior_sum)));
    }

    std::vector<double> shared;
    if (spec.shared_noise > 0.0) {
        shared.resize(static_cast<std::size_t>(spec.n_samples) * kNumClasses);
        for (double& v : shared) v = rng.normal();
    }
    const double shared_w = spec.shared_noise;
    const double own_w = std::sqrt(1.0 - shared_w * shared_w);

    std::vector<ScoreMatrix> models;
    models.reserve(spec.n_models);
    for (int m = 0; m < spec.n_models; ++m) {
        const double target_acc = spec.accuracy[spec.accuracy.size() == 1 ? 0 : m];
        std::vector<double> scores(static_cast<std::size_t>(spec.n_samples) * kNumClasses);
        for (int i = 0; i < spec.n_samples; ++i) {
            int target = static_cast<int>(gold[i]);
            if (rng.uniform01() >= target_acc) {
                int wrong = rng.uniform_int(kNumClasses - 1);
                target = wrong < target ? wrong : wrong + 1;
            }
            std::array<double, kNumClasses> logits;
            for (int c = 0; c < kNumClasses; ++c) {
                double noise = rng.normal();
                if (!shared.empty()) {
                    noise = own_w * noise + shared_w * shared[i * kNumClasses + c];
                }
                logits[c] = (c == target ? spec.sharpness : 0.0) + spec.noise * noise;
            }
            double max_logit = logits[0];
            for (double v : logits) max_logit = std::max(max_logit, v);
            double total = 0.0;
            for (int c = 0; c < kNumClasses; ++c) {
                logits[c] = std::exp(logits[c] - max_logit);
                total += logits[c];
            }
            for (int c = 0; c < kNumClasses; ++c) {
                scores[static_cast<std::size_t>(i) * kNumClasses + c] = logits[c] / total;
            }
        }
        models.push_back(make_score_matrix(synth_model_id(m), ids, std::move(scores)));
    }

    SynthBank out;
    out.gold = make_labeled_set(ids, gold, Split::Val);
    out.bank = align_bank(models, out.gold);
    return out;
}

struct SequenceSpec {
    int n_per_class = 20;      // sequences per class, 2 classes
    int min_descriptors = 3;
    int max_descriptors = 8;
    std::size_t dim = 8;
    double separation = 4.0;   // distance between the class means
    std::uint64_t seed = 1;
};

inline void validate_spec(const SequenceSpec& spec) {
    if (spec.n_per_class < 1) throw Error(ErrorKind::InvalidSpec, "per-class: need >= 1");
    if (spec.min_descriptors < 1 || spec.max_descriptors < spec.min_descriptors) {
        throw Error(ErrorKind::InvalidSpec, "descriptor length range is invalid");
    }
    if (spec.dim < 1) throw Error(ErrorKind::InvalidSpec, "dim: need >= 1");
    if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation)) {
        throw Error(ErrorKind::InvalidSpec, "sep: need >= 0");
    }
}

// Two spherical-normal classes with means +/- sep/2 along the diagonal
// direction. Labels use class indices 0 and 1. Draw order: class 0 sequences
// then class 1; per sequence the length draw, then N*D normals.
inline std::vector<LabeledSequence> gen_sequences(const SequenceSpec& spec) {
    validate_spec(spec);
    SplitMix64 rng(spec.seed);
    const double offset = 0.5 * spec.separation / std::sqrt(static_cast<double>(spec.dim));
    std::vector<LabeledSequence> out;
    out.reserve(2 * static_cast<std::size_t>(spec.n_per_class));
    for (int cls = 0; cls < 2; ++cls) {
        const double mean = cls == 0 ? -offset : offset;
        for (int s = 0; s < spec.n_per_class; ++s) {
            const int span = spec.max_descriptors - spec.min_descriptors + 1;
            const int len = spec.min_descriptors + rng.uniform_int(span);
            DescriptorSequence seq;
            seq.dim = spec.dim;
            seq.data.resize(static_cast<std::size_t>(len) * spec.dim);
            for (double& v : seq.data) v = mean + rng.normal();
            LabeledSequence item;
            item.id = "c" + std::to_string(cls) + "_" + detail::padded_index("", s, 3);
            item.seq = std::move(seq);
            item.label = cls;
            out.push_back(std::move(item));
        }
    }
    return out;
}

}  // namespace latefuse
