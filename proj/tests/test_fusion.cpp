#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "latefuse/fusion.hpp"
#include "latefuse/synth.hpp"
#include "test_support.hpp"

using namespace latefuse;
using testsupport::error_kind_of;

namespace {

ScoreMatrix one_hot_matrix(const std::string& id, const std::vector<std::string>& ids,
                           const std::vector<int>& hot) {
    std::vector<double> flat(ids.size() * kNumClasses, 0.0);
    for (std::size_t i = 0; i < ids.size(); ++i) flat[i * kNumClasses + hot[i]] = 1.0;
    return make_score_matrix(id, ids, flat);
}

// Fuses and scores by the literal definition, written independently of the
// fusion module: plain per-sample average, scan argmax, hit count.
double definition_score(const ModelBank& bank, const std::vector<std::string>& members,
                        const LabeledSet& gold) {
    const std::size_t n_samples = gold.size();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        std::array<double, kNumClasses> avg{};
        for (const auto& id : members) {
            const ScoreMatrix* m = bank.find(id);
            REQUIRE(m != nullptr);
            for (int c = 0; c < kNumClasses; ++c) avg[c] += m->at(i, c);
        }
        for (int c = 0; c < kNumClasses; ++c) avg[c] /= static_cast<double>(members.size());
        int best = 0;
        for (int c = 1; c < kNumClasses; ++c) {
            if (avg[c] > avg[best]) best = c;
        }
        if (best == static_cast<int>(gold.gold[i])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n_samples);
}

SynthBank three_model_bank(std::uint64_t seed) {
    SynthSpec spec;
    spec.n_models = 3;
    spec.n_samples = 60;
    spec.accuracy = {0.55, 0.65, 0.75};
    spec.noise = 0.5;
    spec.sharpness = 4.0;
    spec.seed = seed;
    return gen_bank(spec);
}

bool traces_identical(const std::vector<BeamState>& a, const std::vector<BeamState>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (a[r].round != b[r].round || a[r].pre_best_score != b[r].pre_best_score ||
            a[r].now_best_score != b[r].now_best_score ||
            a[r].beam.size() != b[r].beam.size() ||
            !(a[r].global_best.subset == b[r].global_best.subset) ||
            a[r].global_best.score != b[r].global_best.score) {
            return false;
        }
        for (std::size_t i = 0; i < a[r].beam.size(); ++i) {
            if (!(a[r].beam[i].subset == b[r].beam[i].subset) ||
                a[r].beam[i].score != b[r].beam[i].score) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_CASE("subset canonical form") {
    const Subset s = Subset::from({"b", "a", "c"});
    REQUIRE(s.members == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(s.joined() == "a+b+c");
    REQUIRE(s.contains("b"));
    REQUIRE(!s.contains("d"));
    REQUIRE(s.with("aa").members == std::vector<std::string>{"a", "aa", "b", "c"});
    REQUIRE(error_kind_of([] { Subset::from({"a", "a"}); }) == ErrorKind::BadData);
}

TEST_CASE("mean_fuse basics") {
    const std::vector<std::string> ids = {"s1", "s2"};
    const LabeledSet gold = make_labeled_set(ids, {Emotion::Angry, Emotion::Disgust}, Split::Val);
    auto a = one_hot_matrix("a", ids, {0, 1});
    auto b = one_hot_matrix("b", ids, {1, 1});
    const ModelBank bank = align_bank({a, b}, gold);

    SECTION("singleton is the identity") {
        const ScoreMatrix fused = mean_fuse(bank, Subset::from({"a"}));
        REQUIRE(fused.scores == bank.models[0].scores);
    }
    SECTION("two identical members reproduce the member") {
        const ModelBank twins = align_bank({a, one_hot_matrix("a2", ids, {0, 1})}, gold);
        const ScoreMatrix fused = mean_fuse(twins, Subset::from({"a", "a2"}));
        REQUIRE(fused.scores == twins.models[0].scores);
    }
    SECTION("two one-hot rows average to a half-half row") {
        const ScoreMatrix fused = mean_fuse(bank, Subset::from({"a", "b"}));
        REQUIRE(fused.at(0, 0) == 0.5);
        REQUIRE(fused.at(0, 1) == 0.5);
        REQUIRE(fused.at(1, 1) == 1.0);
    }
    SECTION("errors") {
        REQUIRE(error_kind_of([&] { mean_fuse(bank, Subset{}); }) == ErrorKind::EmptySubset);
        REQUIRE(error_kind_of([&] { mean_fuse(bank, Subset::from({"zz"})); }) ==
                ErrorKind::UnknownModelId);
    }
}

TEST_CASE("weighted_mean_fuse") {
    const std::vector<std::string> ids = {"s1"};
    const LabeledSet gold = make_labeled_set(ids, {Emotion::Angry}, Split::Val);
    auto a = one_hot_matrix("a", ids, {0});
    auto b = one_hot_matrix("b", ids, {1});
    const ModelBank bank = align_bank({a, b}, gold);
    const Subset both = Subset::from({"a", "b"});

    SECTION("equal weights reproduce mean_fuse exactly") {
        const ScoreMatrix mean = mean_fuse(bank, both);
        const ScoreMatrix weighted = weighted_mean_fuse(bank, both, {{"a", 1.0}, {"b", 1.0}});
        REQUIRE(weighted.scores == mean.scores);
        const ScoreMatrix doubled = weighted_mean_fuse(bank, both, {{"a", 2.0}, {"b", 2.0}});
        REQUIRE(doubled.scores == mean.scores);
    }
    SECTION("weight 1/0 selects one member") {
        const ScoreMatrix fused = weighted_mean_fuse(bank, both, {{"a", 1.0}, {"b", 0.0}});
        REQUIRE(fused.scores == bank.models[0].scores);
    }
    SECTION("weights (1,3) give a quarter/three-quarter row") {
        const ScoreMatrix fused = weighted_mean_fuse(bank, both, {{"a", 1.0}, {"b", 3.0}});
        REQUIRE(fused.at(0, 0) == 0.25);
        REQUIRE(fused.at(0, 1) == 0.75);
    }
    SECTION("errors") {
        REQUIRE(error_kind_of([&] { weighted_mean_fuse(bank, both, {{"a", 1.0}}); }) ==
                ErrorKind::WeightMismatch);
        REQUIRE(error_kind_of([&] {
                    weighted_mean_fuse(bank, both, {{"a", 1.0}, {"zz", 1.0}});
                }) == ErrorKind::WeightMismatch);
        REQUIRE(error_kind_of([&] {
                    weighted_mean_fuse(bank, both, {{"a", 0.0}, {"b", 0.0}});
                }) == ErrorKind::AllZeroWeights);
        REQUIRE(error_kind_of([&] {
                    weighted_mean_fuse(bank, both, {{"a", -1.0}, {"b", 2.0}});
                }) == ErrorKind::WeightMismatch);
    }
}

TEST_CASE("majority_vote") {
    const std::vector<std::string> ids = {"s1", "s2"};
    const LabeledSet gold = make_labeled_set(ids, {Emotion::Happy, Emotion::Angry}, Split::Val);
    // votes per sample: (Happy, Happy, Sad) and (Angry, Fear, Fear)
    auto m1 = one_hot_matrix("m1", ids, {3, 0});
    auto m2 = one_hot_matrix("m2", ids, {3, 2});
    auto m3 = one_hot_matrix("m3", ids, {5, 2});
    const ModelBank bank = align_bank({m1, m2, m3}, gold);

    const auto vote = majority_vote(bank, Subset::from({"m1", "m2", "m3"}));
    REQUIRE(vote == std::vector<Emotion>{Emotion::Happy, Emotion::Fear});

    // two-way tie goes to the lower class index: (Angry, Fear) -> Angry
    const auto pair_vote = majority_vote(bank, Subset::from({"m1", "m2"}));
    REQUIRE(pair_vote[1] == Emotion::Angry);

    // one member degenerates to its argmax prediction
    const auto solo = majority_vote(bank, Subset::from({"m2"}));
    REQUIRE(solo == argmax_predict(*bank.find("m2")));
}

TEST_CASE("subset_score matches the literal definition on a seeded bank") {
    const SynthBank sb = three_model_bank(42);

    const double pair_impl = subset_score(sb.bank, Subset::from({"m00", "m02"}), sb.gold);
    const double pair_oracle = definition_score(sb.bank, {"m00", "m02"}, sb.gold);
    REQUIRE(pair_impl == pair_oracle);
    REQUIRE(pair_impl == 46.0 / 60.0);  // frozen from the oracle baseline run

    const double trio_impl = subset_score(sb.bank, Subset::from({"m00", "m01", "m02"}), sb.gold);
    const double trio_oracle = definition_score(sb.bank, {"m00", "m01", "m02"}, sb.gold);
    REQUIRE(trio_impl == trio_oracle);
    REQUIRE(trio_impl == 54.0 / 60.0);  // frozen from the oracle baseline run
}

TEST_CASE("subset_score trivial cases") {
    const std::vector<std::string> ids = {"s1", "s2", "s3"};
    const LabeledSet gold =
        make_labeled_set(ids, {Emotion::Fear, Emotion::Sad, Emotion::Happy}, Split::Val);

    const ModelBank perfect = align_bank({one_hot_matrix("p", ids, {2, 5, 3})}, gold);
    REQUIRE(subset_score(perfect, Subset::from({"p"}), gold) == 1.0);

    // uniform rows predict Angry everywhere (full-tie rule)
    std::vector<double> flat(ids.size() * kNumClasses, 1.0 / kNumClasses);
    const ModelBank uniform = align_bank({make_score_matrix("u", ids, flat)}, gold);
    const LabeledSet angry_gold =
        make_labeled_set(ids, {Emotion::Angry, Emotion::Sad, Emotion::Angry}, Split::Val);
    REQUIRE(subset_score(uniform, Subset::from({"u"}), angry_gold) == 2.0 / 3.0);
}

TEST_CASE("bs_fusion on a single-model bank") {
    const std::vector<std::string> ids = {"s1", "s2"};
    const LabeledSet gold = make_labeled_set(ids, {Emotion::Angry, Emotion::Fear}, Split::Val);
    const ModelBank bank = align_bank({one_hot_matrix("only", ids, {0, 0})}, gold);
    for (int k : {1, 4}) {
        const FusionResult r = bs_fusion(bank, gold, k);
        REQUIRE(r.selected.members == std::vector<std::string>{"only"});
        REQUIRE(r.val_score == 0.5);
        REQUIRE(r.trace.size() == 1);
    }
}

TEST_CASE("bs_fusion finds the oracle best on the pinned 3-model instance") {
    const SynthBank sb = three_model_bank(23);
    const FusionResult r = bs_fusion(sb.bank, sb.gold, 8);
    const ScoredSubset oracle = exhaustive_oracle(sb.bank, sb.gold);
    REQUIRE(r.val_score == oracle.score);
    REQUIRE(r.selected == oracle.subset);
    REQUIRE(r.val_score == 57.0 / 60.0);  // frozen from the oracle baseline run
    REQUIRE(r.selected.joined() == "m00+m01+m02");
}

TEST_CASE("bs_fusion floor, bound and admission invariants over seeds") {
    for (std::uint64_t seed = 100; seed < 112; ++seed) {
        const SynthBank sb = three_model_bank(seed);
        const FusionResult r = bs_fusion(sb.bank, sb.gold, 4);

        double best_singleton = 0.0;
        for (const auto& id : sb.bank.model_ids()) {
            best_singleton = std::max(best_singleton,
                                      subset_score(sb.bank, Subset::from({id}), sb.gold));
        }
        REQUIRE(r.val_score >= best_singleton);

        const ScoredSubset oracle = exhaustive_oracle(sb.bank, sb.gold);
        REQUIRE(r.val_score <= oracle.score);

        // fused matrix equals a from-scratch mean fusion of the selection
        const ScoreMatrix again = mean_fuse(sb.bank, r.selected);
        REQUIRE(r.fused.scores == again.scores);

        // every admitted beam entry strictly improves on the round's pre-best
        for (const BeamState& state : r.trace) {
            REQUIRE(state.beam.size() <= 4);
            for (const ScoredSubset& entry : state.beam) {
                REQUIRE(entry.score > state.pre_best_score);
                REQUIRE(state.global_best.score >= entry.score);
            }
            REQUIRE(std::is_sorted(state.beam.begin(), state.beam.end(), beam_rank_less));
        }
    }
}

TEST_CASE("bs_fusion is order independent and deterministic") {
    SynthSpec spec;
    spec.n_models = 5;
    spec.n_samples = 80;
    spec.accuracy = {0.5, 0.55, 0.6, 0.65, 0.7};
    spec.seed = 7;
    const SynthBank sb = gen_bank(spec);

    const FusionResult base = bs_fusion(sb.bank, sb.gold, 4);

    // permuted model list, same labels
    std::vector<ScoreMatrix> reversed(sb.bank.models.rbegin(), sb.bank.models.rend());
    const ModelBank permuted = align_bank(reversed, sb.gold);
    const FusionResult again = bs_fusion(permuted, sb.gold, 4);

    REQUIRE(base.selected == again.selected);
    REQUIRE(base.val_score == again.val_score);
    REQUIRE(traces_identical(base.trace, again.trace));

    const FusionResult rerun = bs_fusion(sb.bank, sb.gold, 4);
    REQUIRE(traces_identical(base.trace, rerun.trace));
    REQUIRE(base.fused.scores == rerun.fused.scores);
}

TEST_CASE("widening the beam never hurts on seeded instances") {
    for (std::uint64_t seed = 300; seed < 310; ++seed) {
        SynthSpec spec;
        spec.n_models = 6;
        spec.n_samples = 60;
        spec.accuracy = {0.45, 0.5, 0.55, 0.6, 0.65, 0.7};
        spec.seed = seed;
        const SynthBank sb = gen_bank(spec);
        const double k1 = bs_fusion(sb.bank, sb.gold, 1).val_score;
        const double k2 = bs_fusion(sb.bank, sb.gold, 2).val_score;
        const double k8 = bs_fusion(sb.bank, sb.gold, 8).val_score;
        REQUIRE(k2 >= k1);
        REQUIRE(k8 >= k2);
    }
}

TEST_CASE("exhaustive_oracle") {
    SECTION("single model") {
        const std::vector<std::string> ids = {"s1", "s2"};
        const LabeledSet gold =
            make_labeled_set(ids, {Emotion::Angry, Emotion::Fear}, Split::Val);
        const ModelBank bank = align_bank({one_hot_matrix("m", ids, {0, 2})}, gold);
        const ScoredSubset best = exhaustive_oracle(bank, gold);
        REQUIRE(best.subset.members == std::vector<std::string>{"m"});
        REQUIRE(best.score == 1.0);
    }
    SECTION("oracle is at least as good as any singleton") {
        const SynthBank sb = three_model_bank(5);
        const ScoredSubset best = exhaustive_oracle(sb.bank, sb.gold);
        for (const auto& id : sb.bank.model_ids()) {
            REQUIRE(best.score >= subset_score(sb.bank, Subset::from({id}), sb.gold));
        }
    }
    SECTION("guard rejects oversized banks") {
        const SynthBank sb = three_model_bank(5);
        REQUIRE(error_kind_of([&] { exhaustive_oracle(sb.bank, sb.gold, 2); }) ==
                ErrorKind::TooManyModels);
    }
    SECTION("pinned 5-model regression instance") {
        SynthSpec spec;
        spec.n_models = 5;
        spec.n_samples = 100;
        spec.accuracy = {0.6};
        spec.noise = 0.8;
        spec.sharpness = 3.0;
        spec.seed = 1234;
        const SynthBank sb = gen_bank(spec);
        const ScoredSubset best = exhaustive_oracle(sb.bank, sb.gold);
        // frozen output of the oracle baseline run
        REQUIRE(best.subset.joined() == "m00+m01+m02+m03+m04");
        REQUIRE(best.score == 84.0 / 100.0);
        // the beam search on this instance stalls on a plateau below the
        // oracle, which the bound still has to respect
        const FusionResult r = bs_fusion(sb.bank, sb.gold, 8);
        REQUIRE(r.val_score <= best.score);
    }
}
