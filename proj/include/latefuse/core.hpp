// Score matrices, labeled sample sets, aligned model banks and the
// evaluation primitives (argmax prediction, accuracy, confusion matrix).
//
// A score row is one model's class-probability vector for one sample. Rows
// must be row-stochastic: sums within 1e-6 are accepted as-is, drifts up to
// 1e-3 (typical of two-decimal text sources) are renormalized with a warning,
// anything worse is rejected.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "latefuse/common.hpp"

namespace latefuse {

inline constexpr double kRowSumTolerance = 1e-6;
inline constexpr double kRowSumRenormLimit = 1e-3;

struct ScoreMatrix {
    std::string model_id;
    std::vector<std::string> sample_ids;  // length M, unique
    std::vector<double> scores;           // M x 7, row-major, row-stochastic

    std::size_t rows() const { return sample_ids.size(); }

    const double* row(std::size_t i) const { return scores.data() + i * kNumClasses; }

    double at(std::size_t i, int cls) const { return scores[i * kNumClasses + cls]; }
};

// Validating factory. Every ScoreMatrix in the library goes through here, so
// downstream code can rely on the row-stochastic invariant.
inline ScoreMatrix make_score_matrix(std::string model_id,
                                     std::vector<std::string> sample_ids,
                                     std::vector<double> scores,
                                     std::vector<std::string>* warnings = nullptr) {
    if (model_id.empty()) {
        throw Error(ErrorKind::BadData, "model_id must be nonempty");
    }
    if (sample_ids.empty()) {
        throw Error(ErrorKind::EmptyInput, "score matrix '" + model_id + "' has no rows");
    }
    if (scores.size() != sample_ids.size() * kNumClasses) {
        throw Error(ErrorKind::ShapeMismatch,
                    "score matrix '" + model_id + "' has " + std::to_string(scores.size()) +
                        " values for " + std::to_string(sample_ids.size()) + " samples");
    }
    std::unordered_set<std::string> seen;
    seen.reserve(sample_ids.size());
    for (const auto& id : sample_ids) {
        if (id.empty()) {
            throw Error(ErrorKind::BadData, "model '" + model_id + "' has an empty sample id");
        }
        if (!seen.insert(id).second) {
            throw Error(ErrorKind::DuplicateSampleId,
                        "model '" + model_id + "' has duplicate sample id '" + id + "'");
        }
    }
    for (std::size_t i = 0; i < sample_ids.size(); ++i) {
        double sum = 0.0;
        for (int c = 0; c < kNumClasses; ++c) {
            double v = scores[i * kNumClasses + c];
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::NonFiniteInput,
                            "model '" + model_id + "' sample '" + sample_ids[i] +
                                "' has a non-finite score");
            }
            if (v < 0.0) {
                throw Error(ErrorKind::BadData, "model '" + model_id + "' sample '" +
                                                    sample_ids[i] + "' has a negative score");
            }
            sum += v;
        }
        const double drift = std::abs(sum - 1.0);
        if (drift <= kRowSumTolerance) continue;
        if (drift <= kRowSumRenormLimit) {
            for (int c = 0; c < kNumClasses; ++c) scores[i * kNumClasses + c] /= sum;
            if (warnings) {
                warnings->push_back("model '" + model_id + "' sample '" + sample_ids[i] +
                                    "': row sum " + format_double(sum) + " renormalized");
            }
            continue;
        }
        throw Error(ErrorKind::BadData, "model '" + model_id + "' sample '" + sample_ids[i] +
                                            "': row sum " + format_double(sum) +
                                            " too far from 1");
    }
    return ScoreMatrix{std::move(model_id), std::move(sample_ids), std::move(scores)};
}

enum class Split { Train, Val, Test };

inline std::string_view split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        default: return "test";
    }
}

inline Split parse_split(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    throw Error(ErrorKind::BadData, "unknown split tag '" + std::string(name) + "'");
}

struct LabeledSet {
    std::vector<std::string> sample_ids;
    std::vector<Emotion> gold;
    Split split_tag = Split::Val;

    std::size_t size() const { return sample_ids.size(); }
};

inline LabeledSet make_labeled_set(std::vector<std::string> sample_ids,
                                   std::vector<Emotion> gold, Split split_tag) {
    if (sample_ids.size() != gold.size()) {
        throw Error(ErrorKind::LengthMismatch,
                    "labeled set: " + std::to_string(sample_ids.size()) + " ids vs " +
                        std::to_string(gold.size()) + " labels");
    }
    if (sample_ids.empty()) {
        throw Error(ErrorKind::EmptyInput, "labeled set is empty");
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : sample_ids) {
        if (id.empty() || !seen.insert(id).second) {
            throw Error(ErrorKind::DuplicateSampleId,
                        "labeled set has empty or duplicate sample id '" + id + "'");
        }
    }
    return LabeledSet{std::move(sample_ids), std::move(gold), split_tag};
}

// Models aligned on a shared ordered id list. Members are stored sorted by
// model_id, so the bank is independent of input ordering.
struct ModelBank {
    std::vector<ScoreMatrix> models;       // sorted by model_id
    std::vector<std::string> sample_ids;   // shared row order

    std::size_t size() const { return models.size(); }

    const ScoreMatrix* find(const std::string& model_id) const {
        auto it = std::lower_bound(models.begin(), models.end(), model_id,
                                   [](const ScoreMatrix& m, const std::string& id) {
                                       return m.model_id < id;
                                   });
        if (it == models.end() || it->model_id != model_id) return nullptr;
        return &*it;
    }

    std::vector<std::string> model_ids() const {
        std::vector<std::string> ids;
        ids.reserve(models.size());
        for (const auto& m : models) ids.push_back(m.model_id);
        return ids;
    }
};

// Reorders every model's rows to gold's id order. Extra rows are dropped;
// missing rows are an error, never imputed.
inline ModelBank align_bank(const std::vector<ScoreMatrix>& models, const LabeledSet& gold) {
    if (models.empty()) {
        throw Error(ErrorKind::EmptyBank, "cannot align an empty model list");
    }
    std::vector<const ScoreMatrix*> order;
    order.reserve(models.size());
    for (const auto& m : models) order.push_back(&m);
    std::sort(order.begin(), order.end(), [](const ScoreMatrix* a, const ScoreMatrix* b) {
        return a->model_id < b->model_id;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (order[i]->model_id == order[i - 1]->model_id) {
            throw Error(ErrorKind::DuplicateModelId,
                        "duplicate model id '" + order[i]->model_id + "'");
        }
    }

    ModelBank bank;
    bank.sample_ids = gold.sample_ids;
    bank.models.reserve(models.size());
    for (const ScoreMatrix* src : order) {
        std::unordered_map<std::string_view, std::size_t> row_of;
        row_of.reserve(src->rows());
        for (std::size_t i = 0; i < src->rows(); ++i) row_of.emplace(src->sample_ids[i], i);
        std::vector<double> data;
        data.reserve(gold.size() * kNumClasses);
        for (const auto& id : gold.sample_ids) {
            auto it = row_of.find(id);
            if (it == row_of.end()) {
                throw Error(ErrorKind::MissingSample,
                            "model '" + src->model_id + "' is missing sample '" + id + "'");
            }
            const double* row = src->row(it->second);
            data.insert(data.end(), row, row + kNumClasses);
        }
        bank.models.push_back(
            make_score_matrix(src->model_id, gold.sample_ids, std::move(data)));
    }
    return bank;
}

// Per row, the label of the maximum entry; ties go to the lowest class index.
inline std::vector<Emotion> argmax_predict(const ScoreMatrix& scores) {
    std::vector<Emotion> pred;
    pred.reserve(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        const double* row = scores.row(i);
        int best = 0;
        for (int c = 1; c < kNumClasses; ++c) {
            if (row[c] > row[best]) best = c;
        }
        pred.push_back(static_cast<Emotion>(best));
    }
    return pred;
}

inline double accuracy(const std::vector<Emotion>& pred, const std::vector<Emotion>& gold) {
    if (pred.size() != gold.size()) {
        throw Error(ErrorKind::LengthMismatch, "accuracy: " + std::to_string(pred.size()) +
                                                   " predictions vs " +
                                                   std::to_string(gold.size()) + " labels");
    }
    if (pred.empty()) {
        throw Error(ErrorKind::EmptyInput, "accuracy of an empty prediction list");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] == gold[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

struct ConfusionMatrix {
    // rows = gold, columns = predicted
    std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> counts{};
    std::array<std::array<double, kNumClasses>, kNumClasses> row_normalized{};

    std::int64_t total() const {
        std::int64_t t = 0;
        for (const auto& row : counts) {
            for (auto v : row) t += v;
        }
        return t;
    }

    std::int64_t trace() const {
        std::int64_t t = 0;
        for (int c = 0; c < kNumClasses; ++c) t += counts[c][c];
        return t;
    }
};

inline ConfusionMatrix confusion(const std::vector<Emotion>& pred,
                                 const std::vector<Emotion>& gold) {
    if (pred.size() != gold.size()) {
        throw Error(ErrorKind::LengthMismatch, "confusion: " + std::to_string(pred.size()) +
                                                   " predictions vs " +
                                                   std::to_string(gold.size()) + " labels");
    }
    if (pred.empty()) {
        throw Error(ErrorKind::EmptyInput, "confusion of an empty prediction list");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        cm.counts[static_cast<int>(gold[i])][static_cast<int>(pred[i])] += 1;
    }
    for (int g = 0; g < kNumClasses; ++g) {
        std::int64_t row_total = 0;
        for (int p = 0; p < kNumClasses; ++p) row_total += cm.counts[g][p];
        if (row_total == 0) continue;  // all-zero rows normalize to all-zero
        for (int p = 0; p < kNumClasses; ++p) {
            cm.row_normalized[g][p] =
                static_cast<double>(cm.counts[g][p]) / static_cast<double>(row_total);
        }
    }
    return cm;
}

}  // namespace latefuse
