#include <catch2/catch_amalgamated.hpp>

#include "latefuse/io.hpp"
#include "latefuse/synth.hpp"
#include "test_support.hpp"

using namespace latefuse;
using testsupport::error_kind_of;
using testsupport::fixture_path;

TEST_CASE("score csv round trip is byte exact") {
    SynthSpec spec;
    spec.n_models = 1;
    spec.n_samples = 25;
    spec.accuracy = {0.6};
    spec.seed = 31;
    const SynthBank sb = gen_bank(spec);
    const ScoreMatrix& m = sb.bank.models[0];

    const std::string csv = score_matrix_to_csv(m);
    const ScoreMatrix back = parse_score_csv(csv, m.model_id, "mem");
    REQUIRE(back.sample_ids == m.sample_ids);
    REQUIRE(back.scores == m.scores);
    REQUIRE(score_matrix_to_csv(back) == csv);
}

TEST_CASE("score csv validation") {
    SECTION("header must match exactly") {
        REQUIRE(error_kind_of([] {
                    parse_score_csv("sample_id,angry,disgust\nx,1,0\n", "m", "mem");
                }) == ErrorKind::BadData);
    }
    SECTION("field count per row is checked") {
        const std::string text = std::string(kScoreCsvHeader) + "\nx,1,0,0,0\n";
        REQUIRE(error_kind_of([&] { parse_score_csv(text, "m", "mem"); }) == ErrorKind::BadData);
    }
    SECTION("mildly drifted rows are renormalized with a warning") {
        const std::string text =
            std::string(kScoreCsvHeader) + "\nx,0.71,0.00,0.01,0.05,0.19,0.03,0.00\n";
        std::vector<std::string> warnings;
        const ScoreMatrix m = parse_score_csv(text, "m", "mem", &warnings);
        REQUIRE(warnings.size() == 1);  // row sums to 0.99
        double sum = 0.0;
        for (int c = 0; c < kNumClasses; ++c) sum += m.at(0, c);
        REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("empty content is rejected") {
        REQUIRE(error_kind_of([] { parse_score_csv("", "m", "mem"); }) == ErrorKind::BadData);
    }
}

TEST_CASE("gold csv round trip and fixture split counts") {
    const LabeledSet gold = make_labeled_set({"a", "b", "c"},
                                             {Emotion::Happy, Emotion::Angry, Emotion::Surprise},
                                             Split::Test);
    const std::string csv = labeled_set_to_csv(gold);
    const LabeledSet back = parse_gold_csv(csv, Split::Test, "mem");
    REQUIRE(back.sample_ids == gold.sample_ids);
    REQUIRE(back.gold == gold.gold);
    REQUIRE(labeled_set_to_csv(back) == csv);

    SECTION("labels must be canonical") {
        REQUIRE(error_kind_of([] {
                    parse_gold_csv("sample_id,label\nx,Angry\n", Split::Val, "mem");
                }) == ErrorKind::BadData);
    }
    SECTION("the three split fixtures reproduce the published counts") {
        const LabeledSet train = read_gold_csv(fixture_path("afew_train_gold.csv"), Split::Train);
        const LabeledSet val = read_gold_csv(fixture_path("afew_val_gold.csv"), Split::Val);
        const LabeledSet test = read_gold_csv(fixture_path("afew_test_gold.csv"), Split::Test);
        REQUIRE(train.size() == 773);
        REQUIRE(val.size() == 383);
        REQUIRE(test.size() == 653);
        REQUIRE(train.size() + val.size() + test.size() == 1809);

        const auto class_counts = [](const LabeledSet& s) {
            std::array<int, kNumClasses> counts{};
            for (Emotion e : s.gold) counts[static_cast<int>(e)] += 1;
            return counts;
        };
        REQUIRE(class_counts(train) == std::array<int, 7>{133, 74, 81, 150, 144, 117, 74});
        REQUIRE(class_counts(val) == std::array<int, 7>{64, 40, 46, 63, 63, 61, 46});
        REQUIRE(class_counts(test) == std::array<int, 7>{98, 40, 70, 144, 193, 80, 28});
    }
}

TEST_CASE("sequence csv round trip") {
    SequenceSpec spec;
    spec.n_per_class = 3;
    spec.min_descriptors = 2;
    spec.max_descriptors = 5;
    spec.dim = 4;
    spec.seed = 12;
    const auto data = gen_sequences(spec);
    std::vector<NamedSequence> named;
    for (const auto& s : data) {
        named.push_back(NamedSequence{s.id, FeatureSequence{s.seq.dim, s.seq.data}});
    }
    const std::string csv = sequences_to_csv(named);
    const auto back = parse_sequence_csv(csv, "mem");
    REQUIRE(back.size() == named.size());
    for (std::size_t i = 0; i < named.size(); ++i) {
        REQUIRE(back[i].id == named[i].id);
        REQUIRE(back[i].seq.frames == named[i].seq.frames);
    }
    REQUIRE(sequences_to_csv(back) == csv);

    SECTION("non-contiguous sequence rows are rejected") {
        const std::string text = "seq_id,t,f0\na,0,1\nb,0,2\na,1,3\n";
        REQUIRE(error_kind_of([&] { parse_sequence_csv(text, "mem"); }) == ErrorKind::BadData);
    }
    SECTION("time steps must count from zero") {
        const std::string text = "seq_id,t,f0\na,1,1\n";
        REQUIRE(error_kind_of([&] { parse_sequence_csv(text, "mem"); }) == ErrorKind::BadData);
    }
    SECTION("header field names are checked") {
        const std::string text = "seq_id,t,x0\na,0,1\n";
        REQUIRE(error_kind_of([&] { parse_sequence_csv(text, "mem"); }) == ErrorKind::BadData);
    }
}

TEST_CASE("embedding and lemma loaders") {
    const EmbeddingTable table = read_embeddings(fixture_path("toy_embeddings.txt"));
    REQUIRE(table.dim == 3);
    REQUIRE(table.vectors.at("happy") == std::vector<double>{1.0, 0.0, 0.0});
    REQUIRE(table.vectors.at("market") == std::vector<double>{0.0, 0.0, -1.0});

    REQUIRE(error_kind_of([] { parse_embeddings("tok 1 2\nother 1\n", "mem"); }) ==
            ErrorKind::BadData);
    REQUIRE(error_kind_of([] { parse_embeddings("tok 1\ntok 2\n", "mem"); }) ==
            ErrorKind::BadData);

    const LemmaMap lemma = read_lemma_csv(fixture_path("lemma_map.csv"));
    REQUIRE(lemma.at("going") == "go");
    REQUIRE(lemma.at("gone") == "go");
    REQUIRE(error_kind_of([] { parse_lemma_csv("surface\nx\n", "mem"); }) == ErrorKind::BadData);
}

TEST_CASE("cluster parameter checkpoints round trip exactly") {
    SplitMix64 rng(8);
    ClusterParams p = make_cluster_params(3, 2);
    for (double& v : p.anchors) v = rng.normal();
    for (double& v : p.assign_weights) v = rng.normal();
    for (double& v : p.assign_bias) v = rng.normal();
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t j = 0; j < 3; ++j) p.set_sigma(k, j, 0.5 + rng.uniform01());
    }

    const nlohmann::json j = cluster_params_to_json(p);
    REQUIRE(j.at("format_version") == kCheckpointFormatVersion);
    const ClusterParams back = cluster_params_from_json(j);
    REQUIRE(back.anchors == p.anchors);
    REQUIRE(back.assign_weights == p.assign_weights);
    REQUIRE(back.assign_bias == p.assign_bias);
    REQUIRE(back.sigma_raw == p.sigma_raw);

    SECTION("format version is enforced") {
        nlohmann::json bad = j;
        bad["format_version"] = "999";
        REQUIRE(error_kind_of([&] { cluster_params_from_json(bad); }) == ErrorKind::BadData);
    }
    SECTION("shape mismatches are caught") {
        nlohmann::json bad = j;
        bad["anchors"][0].push_back(1.0);
        REQUIRE_THROWS_AS(cluster_params_from_json(bad), Error);
    }
}

TEST_CASE("tfidf model json round trip") {
    const std::vector<TokenList> docs = {{"red", "red", "blue"},
                                         {"red", "green", "green"},
                                         {"red", "green", "blue", "blue"}};
    const TfIdfModel model = build_vocab(docs, 2);
    const nlohmann::json j = tfidf_model_to_json(model);
    const TfIdfModel back = tfidf_model_from_json(j);
    REQUIRE(back.n_docs == model.n_docs);
    REQUIRE(back.min_freq == model.min_freq);
    REQUIRE(back.vocab == model.vocab);
    REQUIRE(back.df == model.df);
}
