// Shared primitives: error type, the fixed 7-class label space, the pinned
// SplitMix64 random stream, and locale-independent numeric formatting.
#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace latefuse {

enum class ErrorKind {
    MissingSample,
    DuplicateModelId,
    DuplicateSampleId,
    LengthMismatch,
    EmptyInput,
    UnknownModelId,
    EmptySubset,
    WeightMismatch,
    AllZeroWeights,
    TooManyModels,
    EmptyBank,
    NonFiniteInput,
    ShapeMismatch,
    EmptyDataset,
    WindowTooLarge,
    InvalidOverlap,
    AllMasked,
    EmptyCorpus,
    NoKnownTokens,
    InvalidSpec,
    BadData,
    IoError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Canonical class order. Identical everywhere: files, matrices, reports.
enum class Emotion : int {
    Angry = 0,
    Disgust = 1,
    Fear = 2,
    Happy = 3,
    Neutral = 4,
    Sad = 5,
    Surprise = 6,
};

inline constexpr int kNumClasses = 7;

inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "angry", "disgust", "fear", "happy", "neutral", "sad", "surprise"};

inline constexpr std::array<std::string_view, kNumClasses> kClassDisplayNames = {
    "Angry", "Disgust", "Fear", "Happy", "Neutral", "Sad", "Surprise"};

inline std::string_view class_name(Emotion e) {
    return kClassNames[static_cast<int>(e)];
}

inline Emotion parse_label(std::string_view name) {
    for (int i = 0; i < kNumClasses; ++i) {
        if (kClassNames[i] == name) return static_cast<Emotion>(i);
    }
    throw Error(ErrorKind::BadData, "unknown class label '" + std::string(name) + "'");
}

// Shortest round-trip decimal form, '.' separator, locale independent.
inline std::string format_double(double v) {
    std::array<char, 64> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw Error(ErrorKind::BadData, "not a number: '" + std::string(text) + "'");
    }
    return v;
}

inline std::int64_t parse_int(std::string_view text) {
    std::int64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw Error(ErrorKind::BadData, "not an integer: '" + std::string(text) + "'");
    }
    return v;
}

// Pinned random stream. The exact update, the 53-bit uniform mapping and the
// Box-Muller transform are part of the fixture contract: any reimplementation
// that follows them reproduces every generated file byte for byte.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 significant bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    int uniform_int(int n) {
        int v = static_cast<int>(uniform01() * n);
        return v < n ? v : n - 1;
    }

    // Standard normal via Box-Muller; the pair is consumed in cos/sin order.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(static_cast<int>(i)));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline void require_finite(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::NonFiniteInput, std::string(what) + " contains a non-finite value");
        }
    }
}

}  // namespace latefuse
