// Late fusion of aligned score matrices: uniform and weighted mean, majority
// vote, beam-search subset selection, and the exhaustive-subset oracle used
// as its ground-truth upper bound.
//
// Beam-search fusion grows model subsets one member per round. Each round
// every beam subset is extended by every absent model, candidates are
// deduplicated, only strict improvements over the previous round's best score
// survive, and the top K survivors (score desc, size asc, lexicographic ids)
// form the next beam. The search stops when no candidate survives, and the
// best subset evaluated anywhere in the run is returned.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "latefuse/common.hpp"
#include "latefuse/core.hpp"

namespace latefuse {

// Canonical model subset: members sorted, no duplicates. Equality, hashing
// and every tie-break in this module work on this sorted form.
struct Subset {
    std::vector<std::string> members;

    static Subset from(std::vector<std::string> ids) {
        std::sort(ids.begin(), ids.end());
        for (std::size_t i = 1; i < ids.size(); ++i) {
            if (ids[i] == ids[i - 1]) {
                throw Error(ErrorKind::BadData, "subset has duplicate member '" + ids[i] + "'");
            }
        }
        return Subset{std::move(ids)};
    }

    bool contains(const std::string& id) const {
        return std::binary_search(members.begin(), members.end(), id);
    }

    Subset with(const std::string& id) const {
        Subset out = *this;
        out.members.insert(std::upper_bound(out.members.begin(), out.members.end(), id), id);
        return out;
    }

    std::size_t size() const { return members.size(); }
    bool empty() const { return members.empty(); }

    std::string joined(char sep = '+') const {
        std::string out;
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i) out.push_back(sep);
            out += members[i];
        }
        return out;
    }

    friend bool operator==(const Subset& a, const Subset& b) { return a.members == b.members; }
    friend bool operator<(const Subset& a, const Subset& b) {
        if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
        return a.members < b.members;
    }
};

struct ScoredSubset {
    Subset subset;
    double score = 0.0;
};

// Beam ranking: score desc, then size asc, then lexicographic member ids.
inline bool beam_rank_less(const ScoredSubset& a, const ScoredSubset& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.subset.size() != b.subset.size()) return a.subset.size() < b.subset.size();
    return a.subset.members < b.subset.members;
}

struct BeamState {
    int round = 0;
    double pre_best_score = 0.0;
    double now_best_score = 0.0;
    std::vector<ScoredSubset> beam;  // sorted by beam_rank_less, length <= K
    ScoredSubset global_best;
};

struct FusionResult {
    Subset selected;
    ScoreMatrix fused;
    double val_score = 0.0;
    std::vector<BeamState> trace;
};

namespace detail {

inline void ensure_aligned(const ModelBank& bank, const LabeledSet& gold) {
    if (bank.sample_ids != gold.sample_ids) {
        throw Error(ErrorKind::ShapeMismatch, "bank and gold labels are not aligned");
    }
}

inline const ScoreMatrix& member_or_throw(const ModelBank& bank, const std::string& id) {
    const ScoreMatrix* m = bank.find(id);
    if (!m) throw Error(ErrorKind::UnknownModelId, "model '" + id + "' is not in the bank");
    return *m;
}

}  // namespace detail

// Convex combination of member matrices, weights normalized to sum 1.
inline ScoreMatrix weighted_mean_fuse(const ModelBank& bank, const Subset& subset,
                                      const std::map<std::string, double>& weights) {
    if (subset.empty()) throw Error(ErrorKind::EmptySubset, "cannot fuse an empty subset");
    if (weights.size() != subset.size()) {
        throw Error(ErrorKind::WeightMismatch,
                    "got " + std::to_string(weights.size()) + " weights for " +
                        std::to_string(subset.size()) + " subset members");
    }
    double weight_sum = 0.0;
    for (const auto& id : subset.members) {
        auto it = weights.find(id);
        if (it == weights.end()) {
            throw Error(ErrorKind::WeightMismatch, "no weight for model '" + id + "'");
        }
        if (!std::isfinite(it->second) || it->second < 0.0) {
            throw Error(ErrorKind::WeightMismatch,
                        "weight for model '" + id + "' must be finite and >= 0");
        }
        weight_sum += it->second;
    }
    if (weight_sum <= 0.0) {
        throw Error(ErrorKind::AllZeroWeights, "subset weights sum to zero");
    }

    const std::size_t n_rows = bank.sample_ids.size();
    std::vector<double> fused(n_rows * kNumClasses, 0.0);
    for (const auto& id : subset.members) {
        const ScoreMatrix& m = detail::member_or_throw(bank, id);
        const double u = weights.at(id) / weight_sum;
        for (std::size_t v = 0; v < fused.size(); ++v) fused[v] += u * m.scores[v];
    }
    return make_score_matrix(subset.joined(), bank.sample_ids, std::move(fused));
}

// Uniform mean; same accumulation path as the weighted variant so that equal
// explicit weights reproduce it exactly.
inline ScoreMatrix mean_fuse(const ModelBank& bank, const Subset& subset) {
    std::map<std::string, double> unit;
    for (const auto& id : subset.members) unit[id] = 1.0;
    return weighted_mean_fuse(bank, subset, unit);
}

// Each member votes its argmax label; plurality wins, vote ties go to the
// lowest class index among the tied labels.
inline std::vector<Emotion> majority_vote(const ModelBank& bank, const Subset& subset) {
    if (subset.empty()) throw Error(ErrorKind::EmptySubset, "cannot vote with an empty subset");
    const std::size_t n_rows = bank.sample_ids.size();
    std::vector<int> votes(n_rows * kNumClasses, 0);
    for (const auto& id : subset.members) {
        const ScoreMatrix& m = detail::member_or_throw(bank, id);
        std::vector<Emotion> pred = argmax_predict(m);
        for (std::size_t i = 0; i < n_rows; ++i) {
            votes[i * kNumClasses + static_cast<int>(pred[i])] += 1;
        }
    }
    std::vector<Emotion> out;
    out.reserve(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
        int best = 0;
        for (int c = 1; c < kNumClasses; ++c) {
            if (votes[i * kNumClasses + c] > votes[i * kNumClasses + best]) best = c;
        }
        out.push_back(static_cast<Emotion>(best));
    }
    return out;
}

// Accuracy of uniform-mean fusion, the score beam search optimizes.
inline double subset_score(const ModelBank& bank, const Subset& subset, const LabeledSet& gold) {
    detail::ensure_aligned(bank, gold);
    return accuracy(argmax_predict(mean_fuse(bank, subset)), gold.gold);
}

inline constexpr int kDefaultOracleGuard = 16;

// Best of all 2^N - 1 nonempty subsets under subset_score; ties broken by the
// beam ranking order. Ground truth for the beam search, exponential in N.
inline ScoredSubset exhaustive_oracle(const ModelBank& bank, const LabeledSet& gold,
                                      int guard = kDefaultOracleGuard) {
    detail::ensure_aligned(bank, gold);
    const int n = static_cast<int>(bank.size());
    if (n == 0) throw Error(ErrorKind::EmptyBank, "oracle over an empty bank");
    if (n > guard) {
        throw Error(ErrorKind::TooManyModels, "oracle over " + std::to_string(n) +
                                                  " models exceeds guard " +
                                                  std::to_string(guard));
    }
    const std::vector<std::string> ids = bank.model_ids();
    ScoredSubset best;
    bool have_best = false;
    for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
        std::vector<std::string> members;
        for (int j = 0; j < n; ++j) {
            if (mask & (1ULL << j)) members.push_back(ids[j]);
        }
        ScoredSubset cand{Subset::from(std::move(members)), 0.0};
        cand.score = subset_score(bank, cand.subset, gold);
        if (!have_best || beam_rank_less(cand, best)) {
            best = std::move(cand);
            have_best = true;
        }
    }
    return best;
}

// Beam-search subset selection over the aligned bank. K is the beam width.
inline FusionResult bs_fusion(const ModelBank& bank, const LabeledSet& gold, int beam_width) {
    detail::ensure_aligned(bank, gold);
    if (bank.size() == 0) throw Error(ErrorKind::EmptyBank, "fusion over an empty bank");
    if (beam_width < 1) {
        throw Error(ErrorKind::InvalidSpec, "beam width must be >= 1, got " +
                                                std::to_string(beam_width));
    }

    const std::vector<std::string> ids = bank.model_ids();
    const int n = static_cast<int>(ids.size());

    // Seeding with one empty subset makes round 1 evaluate every singleton.
    std::vector<ScoredSubset> beam{ScoredSubset{Subset{}, 0.0}};
    double pre_best = 0.0;
    double now_best = 0.0;
    ScoredSubset global_best;
    bool have_global = false;

    FusionResult result;
    for (int round = 1; round <= n; ++round) {
        pre_best = now_best;

        std::set<Subset> candidates;
        for (const ScoredSubset& entry : beam) {
            for (const std::string& id : ids) {
                if (!entry.subset.contains(id)) candidates.insert(entry.subset.with(id));
            }
        }

        std::vector<ScoredSubset> survivors;
        for (const Subset& cand : candidates) {
            ScoredSubset scored{cand, subset_score(bank, cand, gold)};
            if (!have_global || beam_rank_less(scored, global_best)) {
                global_best = scored;
                have_global = true;
            }
            if (scored.score > pre_best) survivors.push_back(std::move(scored));
        }
        if (survivors.empty()) break;

        std::sort(survivors.begin(), survivors.end(), beam_rank_less);
        if (survivors.size() > static_cast<std::size_t>(beam_width)) {
            survivors.resize(static_cast<std::size_t>(beam_width));
        }
        now_best = survivors.front().score;
        beam = survivors;
        result.trace.push_back(BeamState{round, pre_best, now_best, beam, global_best});
    }

    result.selected = global_best.subset;
    result.val_score = global_best.score;
    result.fused = mean_fuse(bank, result.selected);
    return result;
}

}  // namespace latefuse
