// Sequence preprocessing: fixed-length padding with masks, temporal window
// concatenation with adjustable overlap, and mean/max pooling functionals.
#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "latefuse/common.hpp"

namespace latefuse {

struct FeatureSequence {
    std::size_t dim = 0;
    std::vector<double> frames;  // L x dim, row-major

    std::size_t length() const { return dim == 0 ? 0 : frames.size() / dim; }

    const double* frame(std::size_t t) const { return frames.data() + t * dim; }
};

inline FeatureSequence make_feature_sequence(std::size_t dim, std::vector<double> frames) {
    if (dim == 0 || frames.empty() || frames.size() % dim != 0) {
        throw Error(ErrorKind::ShapeMismatch,
                    "feature sequence needs L x dim values with dim >= 1, L >= 1");
    }
    require_finite(frames, "feature sequence");
    return FeatureSequence{dim, std::move(frames)};
}

struct PaddedSequence {
    FeatureSequence seq;             // exactly target_len frames
    std::vector<std::uint8_t> mask;  // 1 = real frame, 0 = zero padding
};

// Right-pad with zero frames or truncate the tail to exactly target_len.
inline PaddedSequence pad_or_truncate(const FeatureSequence& seq, std::size_t target_len) {
    if (target_len < 1) {
        throw Error(ErrorKind::InvalidSpec, "target length must be >= 1");
    }
    PaddedSequence out;
    out.seq.dim = seq.dim;
    const std::size_t keep = std::min(seq.length(), target_len);
    out.seq.frames.assign(seq.frames.begin(),
                          seq.frames.begin() + static_cast<std::ptrdiff_t>(keep * seq.dim));
    out.seq.frames.resize(target_len * seq.dim, 0.0);
    out.mask.assign(keep, 1);
    out.mask.resize(target_len, 0);
    return out;
}

// Concatenates each window of consecutive frames into one output frame.
// Windows start at stride (window - overlap); an incomplete tail is dropped,
// so the output length is floor((L - window) / stride) + 1.
inline FeatureSequence window_concat(const FeatureSequence& seq, std::size_t window,
                                     std::size_t overlap) {
    if (window < 1) {
        throw Error(ErrorKind::InvalidSpec, "window must be >= 1");
    }
    if (overlap >= window) {
        throw Error(ErrorKind::InvalidOverlap, "overlap " + std::to_string(overlap) +
                                                   " must be smaller than window " +
                                                   std::to_string(window));
    }
    const std::size_t len = seq.length();
    if (len < window) {
        throw Error(ErrorKind::WindowTooLarge, "window " + std::to_string(window) +
                                                   " exceeds sequence length " +
                                                   std::to_string(len));
    }
    const std::size_t stride = window - overlap;
    const std::size_t n_windows = (len - window) / stride + 1;
    FeatureSequence out;
    out.dim = window * seq.dim;
    out.frames.reserve(n_windows * out.dim);
    for (std::size_t w = 0; w < n_windows; ++w) {
        const double* start = seq.frame(w * stride);
        out.frames.insert(out.frames.end(), start, start + window * seq.dim);
    }
    return out;
}

enum class Functional { Mean, Max };

inline Functional parse_functional(std::string_view name) {
    if (name == "mean") return Functional::Mean;
    if (name == "max") return Functional::Max;
    throw Error(ErrorKind::BadData, "unknown functional '" + std::string(name) + "'");
}

// Coordinatewise mean or max over unmasked frames.
inline std::vector<double> pool(const FeatureSequence& seq, Functional functional,
                                const std::vector<std::uint8_t>* mask = nullptr) {
    const std::size_t len = seq.length();
    if (mask && mask->size() != len) {
        throw Error(ErrorKind::LengthMismatch, "mask length " + std::to_string(mask->size()) +
                                                   " vs sequence length " + std::to_string(len));
    }
    std::vector<double> out;
    std::size_t used = 0;
    for (std::size_t t = 0; t < len; ++t) {
        if (mask && !(*mask)[t]) continue;
        const double* f = seq.frame(t);
        if (used == 0) {
            out.assign(f, f + seq.dim);
        } else if (functional == Functional::Mean) {
            for (std::size_t j = 0; j < seq.dim; ++j) out[j] += f[j];
        } else {
            for (std::size_t j = 0; j < seq.dim; ++j) out[j] = std::max(out[j], f[j]);
        }
        ++used;
    }
    if (used == 0) {
        throw Error(ErrorKind::AllMasked, "pooling needs at least one unmasked frame");
    }
    if (functional == Functional::Mean) {
        for (double& v : out) v /= static_cast<double>(used);
    }
    return out;
}

}  // namespace latefuse
