// Central finite-difference verification of the analytic aggregation
// gradients. Each instance draws a random sequence, random parameters and a
// random upstream vector, then compares every gradient coordinate of every
// parameter group against (f(t+h) - f(t-h)) / 2h for the scalar
// f = upstream . forward.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "latefuse/aggregation.hpp"
#include "latefuse/common.hpp"

namespace latefuse {

struct GradCheckSettings {
    int instances = 20;
    double step = 1e-5;
    double rel_tol = 1e-5;
    double abs_tol = 1e-8;  // absolute slack near zero
    bool normalize = false;
    // Test hook: added to every analytic gradient coordinate to prove the
    // harness catches a wrong backward pass.
    double perturbation = 0.0;
    std::size_t max_dim = 8;
    std::size_t max_clusters = 4;
    std::size_t max_descriptors = 10;
};

struct GradCheckGroup {
    std::string group;
    std::size_t coordinates = 0;
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
    std::string worst;  // "instance=3 coord=7 analytic=... numeric=..."
    bool pass = true;
};

struct GradCheckReport {
    AggKind kind = AggKind::NetVLAD;
    int instances = 0;
    std::vector<GradCheckGroup> groups;
    bool pass = true;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace detail

inline GradCheckReport run_gradient_check(AggKind kind, std::uint64_t seed,
                                          const GradCheckSettings& settings = {}) {
    GradCheckReport report;
    report.kind = kind;
    report.instances = settings.instances;
    const bool has_sigma = kind == AggKind::NetFV;
    std::vector<std::string> group_names = {"descriptors", "anchors", "assign_weights",
                                            "assign_bias"};
    if (has_sigma) group_names.push_back("sigma_raw");
    for (const auto& name : group_names) {
        GradCheckGroup group;
        group.group = name;
        report.groups.push_back(std::move(group));
    }

    SplitMix64 rng(seed);
    for (int instance = 0; instance < settings.instances; ++instance) {
        const std::size_t D = 2 + static_cast<std::size_t>(
                                      rng.uniform_int(static_cast<int>(settings.max_dim) - 1));
        const std::size_t K = 1 + static_cast<std::size_t>(
                                      rng.uniform_int(static_cast<int>(settings.max_clusters)));
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(
                                      static_cast<int>(settings.max_descriptors)));

        DescriptorSequence seq;
        seq.dim = D;
        seq.data.resize(n * D);
        for (double& v : seq.data) v = rng.normal();

        ClusterParams params = make_cluster_params(D, K);
        for (double& v : params.anchors) v = 0.5 * rng.normal();
        for (double& v : params.assign_weights) v = 0.5 * rng.normal();
        for (double& v : params.assign_bias) v = 0.1 * rng.normal();
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t j = 0; j < D; ++j) {
                params.set_sigma(k, j, 0.5 + rng.uniform01());
            }
        }

        std::vector<double> upstream(output_dim(kind, D, K));
        for (double& v : upstream) v = rng.normal();

        const AggOptions options{settings.normalize};
        const AggGradients analytic = aggregate_backward(kind, seq, params, upstream, options);

        const auto scalar = [&](const DescriptorSequence& s, const ClusterParams& p) {
            return detail::dot(upstream, aggregate_forward(kind, s, p, options));
        };

        // group name -> (mutable storage for +/- h probes, analytic values)
        struct Probe {
            std::vector<double>* storage;
            const std::vector<double>* gradient;
        };
        DescriptorSequence seq_probe = seq;
        ClusterParams params_probe = params;
        std::vector<Probe> probes = {
            {&seq_probe.data, &analytic.descriptors},
            {&params_probe.anchors, &analytic.anchors},
            {&params_probe.assign_weights, &analytic.assign_weights},
            {&params_probe.assign_bias, &analytic.assign_bias},
        };
        if (has_sigma) probes.push_back({&params_probe.sigma_raw, &analytic.sigma_raw});

        for (std::size_t gi = 0; gi < probes.size(); ++gi) {
            GradCheckGroup& group = report.groups[gi];
            std::vector<double>& storage = *probes[gi].storage;
            const std::vector<double>& gradient = *probes[gi].gradient;
            for (std::size_t c = 0; c < storage.size(); ++c) {
                const double saved = storage[c];
                storage[c] = saved + settings.step;
                const double up = scalar(seq_probe, params_probe);
                storage[c] = saved - settings.step;
                const double down = scalar(seq_probe, params_probe);
                storage[c] = saved;

                const double numeric = (up - down) / (2.0 * settings.step);
                const double analytic_value = gradient[c] + settings.perturbation;
                const double abs_err = std::abs(analytic_value - numeric);
                const double scale = std::max(std::abs(analytic_value), std::abs(numeric));
                // Coordinates inside the absolute slack are exempt from the
                // relative bar; they contribute 0 to the reported maximum.
                const double rel_err =
                    (abs_err <= settings.abs_tol || scale == 0.0) ? 0.0 : abs_err / scale;

                group.coordinates += 1;
                if (rel_err > group.max_rel_error) {
                    group.max_rel_error = rel_err;
                    group.worst = "instance=" + std::to_string(instance) +
                                  " coord=" + std::to_string(c) +
                                  " analytic=" + format_double(analytic_value) +
                                  " numeric=" + format_double(numeric);
                }
                group.max_abs_error = std::max(group.max_abs_error, abs_err);
                if (rel_err > settings.rel_tol) group.pass = false;
            }
        }
    }
    for (const auto& g : report.groups) report.pass = report.pass && g.pass;
    return report;
}

}  // namespace latefuse
