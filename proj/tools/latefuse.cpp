// Command-line surface over the library: synthetic data generation, fusion,
// evaluation, gradient checking and the file-level feature wrappers.
//
// Reports are JSON on stdout; --pretty switches the commands that have a
// human rendering to an aligned text table. Exit codes are stable: 0 success,
// 2 argument error, 3 data error, 4 check failure. Existing output files are
// never overwritten without --force.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "latefuse/latefuse.hpp"

using nlohmann::json;
using namespace latefuse;

namespace {

std::vector<std::string> g_argv;

// Tracks effective option values and where each came from: command-line flag,
// config file, or the built-in default.
class EchoConfig {
public:
    explicit EchoConfig(const CLI::App* sub) : sub_(sub) {}

    template <typename T>
    void add(const std::string& flag, const T& value) {
        const std::string key = flag.substr(2);
        values_[key] = value;
        sources_[key] = source_of(flag);
    }

    json values() const { return values_; }
    json sources() const { return sources_; }

private:
    std::string source_of(const std::string& flag) const {
        const CLI::Option* opt = sub_->get_option(flag);
        if (opt->count() == 0) return "default";
        for (const std::string& token : g_argv) {
            if (token == flag || token.rfind(flag + "=", 0) == 0) return "flag";
        }
        return "config";
    }

    const CLI::App* sub_;
    json values_ = json::object();
    json sources_ = json::object();
};

json make_report(const std::string& command, const EchoConfig& echo) {
    return json{{"format_version", "1"},
                {"command", command},
                {"config", echo.values()},
                {"config_provenance", echo.sources()}};
}

void emit(const json& report) { std::cout << report.dump(2) << "\n"; }

void ensure_writable(const std::string& path, bool force) {
    if (!force && std::filesystem::exists(path)) {
        throw Error(ErrorKind::IoError, "'" + path + "' exists; pass --force to overwrite");
    }
}

void write_output(const std::string& path, std::string_view content, bool force) {
    ensure_writable(path, force);
    write_text_file(path, content);
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        if (end > start) {
            try {
                values.push_back(parse_double(std::string_view(text).substr(start, end - start)));
            } catch (const Error&) {
                throw Error(ErrorKind::InvalidSpec,
                            std::string(what) + ": '" + text + "' is not a comma-separated "
                                                               "list of numbers");
            }
        }
        start = end + 1;
    }
    if (values.empty()) {
        throw Error(ErrorKind::InvalidSpec, std::string(what) + ": empty list");
    }
    return values;
}

std::array<double, kNumClasses> parse_prior(const std::string& text) {
    if (text == "uniform") return {1, 1, 1, 1, 1, 1, 1};
    if (text == "afew-train") return {133, 74, 81, 150, 144, 117, 74};
    const std::vector<double> values = parse_double_list(text, "prior");
    if (values.size() != kNumClasses) {
        throw Error(ErrorKind::InvalidSpec, "prior: need 7 values, got " +
                                                std::to_string(values.size()));
    }
    std::array<double, kNumClasses> prior{};
    std::copy(values.begin(), values.end(), prior.begin());
    return prior;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// ---------------------------------------------------------------------------
// gen-bank

struct GenBankArgs {
    int models = 3;
    int samples = 200;
    std::string acc = "0.6";
    double noise = 0.5;
    double sharpness = 4.0;
    std::string prior = "uniform";
    double shared_noise = 0.0;
    std::uint64_t seed = 1;
    std::string split = "val";
    std::string out;
    bool force = false;
};

int run_gen_bank(const CLI::App* sub, const GenBankArgs& args) {
    SynthSpec spec;
    spec.n_models = args.models;
    spec.n_samples = args.samples;
    spec.accuracy = parse_double_list(args.acc, "acc");
    spec.noise = args.noise;
    spec.sharpness = args.sharpness;
    spec.prior = parse_prior(args.prior);
    spec.shared_noise = args.shared_noise;
    spec.seed = args.seed;
    validate_spec(spec);
    const Split split = parse_split(args.split);

    std::filesystem::create_directories(args.out);
    SynthBank sb = gen_bank(spec);
    sb.gold.split_tag = split;

    EchoConfig echo(sub);
    echo.add("--models", args.models);
    echo.add("--samples", args.samples);
    echo.add("--acc", args.acc);
    echo.add("--noise", args.noise);
    echo.add("--sharpness", args.sharpness);
    echo.add("--prior", args.prior);
    echo.add("--shared-noise", args.shared_noise);
    echo.add("--seed", args.seed);
    echo.add("--split-tag", args.split);
    echo.add("--out", args.out);

    json files = json::object();
    json model_files = json::array();
    for (const ScoreMatrix& m : sb.bank.models) {
        const std::string path = args.out + "/" + m.model_id + ".csv";
        write_output(path, score_matrix_to_csv(m), args.force);
        model_files.push_back(path);
    }
    const std::string gold_path = args.out + "/gold.csv";
    write_output(gold_path, labeled_set_to_csv(sb.gold), args.force);
    files["models"] = model_files;
    files["gold"] = gold_path;

    json report = make_report("gen-bank", echo);
    report["files"] = files;
    emit(report);
    return 0;
}

// ---------------------------------------------------------------------------
// gen-seqs

struct GenSeqsArgs {
    int per_class = 20;
    int len_min = 3;
    int len_max = 8;
    std::size_t dim = 8;
    double sep = 4.0;
    std::uint64_t seed = 1;
    std::string out;
    bool force = false;
};

int run_gen_seqs(const CLI::App* sub, const GenSeqsArgs& args) {
    SequenceSpec spec;
    spec.n_per_class = args.per_class;
    spec.min_descriptors = args.len_min;
    spec.max_descriptors = args.len_max;
    spec.dim = args.dim;
    spec.separation = args.sep;
    spec.seed = args.seed;
    validate_spec(spec);

    std::filesystem::create_directories(args.out);
    const std::vector<LabeledSequence> data = gen_sequences(spec);

    std::vector<NamedSequence> named;
    std::vector<std::string> ids;
    std::vector<Emotion> labels;
    for (const LabeledSequence& s : data) {
        named.push_back(NamedSequence{s.id, FeatureSequence{s.seq.dim, s.seq.data}});
        ids.push_back(s.id);
        labels.push_back(static_cast<Emotion>(s.label));
    }
    const std::string seq_path = args.out + "/sequences.csv";
    const std::string label_path = args.out + "/labels.csv";
    write_output(seq_path, sequences_to_csv(named), args.force);
    write_output(label_path, labeled_set_to_csv(make_labeled_set(ids, labels, Split::Train)),
                 args.force);

    EchoConfig echo(sub);
    echo.add("--per-class", args.per_class);
    echo.add("--len-min", args.len_min);
    echo.add("--len-max", args.len_max);
    echo.add("--dim", args.dim);
    echo.add("--sep", args.sep);
    echo.add("--seed", args.seed);
    echo.add("--out", args.out);

    json report = make_report("gen-seqs", echo);
    report["files"] = {{"sequences", seq_path}, {"labels", label_path}};
    report["count"] = data.size();
    emit(report);
    return 0;
}

// ---------------------------------------------------------------------------
// fuse

struct FuseArgs {
    std::string method;
    std::vector<std::string> scores;
    std::string gold;
    std::string split = "val";
    int beam_width = 8;
    int guard = kDefaultOracleGuard;
    std::string weights;
    std::string out_report;
    std::string out_fused;
    bool force = false;
};

json subset_to_json(const ScoredSubset& s) {
    return json{{"members", s.subset.members}, {"score", s.score}};
}

int run_fuse(const CLI::App* sub, const FuseArgs& args) {
    std::vector<ScoreMatrix> models;
    std::vector<std::string> warnings;
    for (const std::string& path : args.scores) {
        models.push_back(read_score_csv(path, model_id_from_path(path), &warnings));
    }
    print_warnings(warnings);
    const LabeledSet gold = read_gold_csv(args.gold, parse_split(args.split));
    const ModelBank bank = align_bank(models, gold);

    EchoConfig echo(sub);
    echo.add("--method", args.method);
    echo.add("--scores", args.scores);
    echo.add("--gold", args.gold);
    echo.add("--split-tag", args.split);
    echo.add("--k", args.beam_width);
    echo.add("--guard", args.guard);
    echo.add("--weights", args.weights);

    json report = make_report("fuse", echo);
    std::string fused_csv;

    if (args.method == "bs") {
        const FusionResult r = bs_fusion(bank, gold, args.beam_width);
        report["selected"] = r.selected.members;
        report["val_score"] = r.val_score;
        json trace = json::array();
        for (const BeamState& state : r.trace) {
            json beam = json::array();
            for (const ScoredSubset& entry : state.beam) beam.push_back(subset_to_json(entry));
            trace.push_back(json{{"round", state.round},
                                 {"pre_best_score", state.pre_best_score},
                                 {"now_best_score", state.now_best_score},
                                 {"beam", std::move(beam)},
                                 {"global_best", subset_to_json(state.global_best)}});
        }
        report["trace"] = std::move(trace);
        fused_csv = score_matrix_to_csv(r.fused);
    } else if (args.method == "mean" || args.method == "weighted") {
        const Subset all = Subset::from(bank.model_ids());
        ScoreMatrix fused = [&] {
            if (args.method == "mean") return mean_fuse(bank, all);
            const std::vector<double> values = parse_double_list(args.weights, "weights");
            if (values.size() != args.scores.size()) {
                throw Error(ErrorKind::WeightMismatch,
                            "got " + std::to_string(values.size()) + " weights for " +
                                std::to_string(args.scores.size()) + " score files");
            }
            // weights align with the --scores file order
            std::map<std::string, double> by_id;
            for (std::size_t i = 0; i < values.size(); ++i) {
                by_id[model_id_from_path(args.scores[i])] = values[i];
            }
            return weighted_mean_fuse(bank, all, by_id);
        }();
        report["selected"] = all.members;
        report["val_score"] = accuracy(argmax_predict(fused), gold.gold);
        fused_csv = score_matrix_to_csv(fused);
    } else if (args.method == "vote") {
        const Subset all = Subset::from(bank.model_ids());
        const std::vector<Emotion> pred = majority_vote(bank, all);
        report["selected"] = all.members;
        report["val_score"] = accuracy(pred, gold.gold);
        fused_csv = labeled_set_to_csv(make_labeled_set(gold.sample_ids, pred, gold.split_tag));
    } else if (args.method == "oracle") {
        const ScoredSubset best = exhaustive_oracle(bank, gold, args.guard);
        report["selected"] = best.subset.members;
        report["val_score"] = best.score;
        fused_csv = score_matrix_to_csv(mean_fuse(bank, best.subset));
    } else {
        throw Error(ErrorKind::InvalidSpec, "method: unknown method '" + args.method + "'");
    }

    if (!args.out_fused.empty()) {
        write_output(args.out_fused, fused_csv, args.force);
        report["files"] = {{"fused", args.out_fused}};
    }
    if (!args.out_report.empty()) {
        write_output(args.out_report, report.dump(2) + "\n", args.force);
    }
    emit(report);
    return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string pred;
    std::string gold;
    std::string split = "val";
    std::string out;
    bool pretty = false;
    bool force = false;
};

int run_eval(const CLI::App* sub, const EvalArgs& args) {
    const LabeledSet gold = read_gold_csv(args.gold, parse_split(args.split));

    // Prediction input is either a score file (argmax is applied) or a label
    // file in the gold format; the header decides.
    const std::string content = read_text_file(args.pred);
    std::map<std::string, Emotion> by_id;
    if (content.rfind(kScoreCsvHeader, 0) == 0) {
        std::vector<std::string> warnings;
        const ScoreMatrix scores = parse_score_csv(content, "predictions", args.pred, &warnings);
        print_warnings(warnings);
        const std::vector<Emotion> pred = argmax_predict(scores);
        for (std::size_t i = 0; i < scores.rows(); ++i) by_id[scores.sample_ids[i]] = pred[i];
    } else {
        const LabeledSet labels = parse_gold_csv(content, gold.split_tag, args.pred);
        for (std::size_t i = 0; i < labels.size(); ++i) by_id[labels.sample_ids[i]] = labels.gold[i];
    }
    std::vector<Emotion> pred;
    pred.reserve(gold.size());
    for (const std::string& id : gold.sample_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw Error(ErrorKind::MissingSample,
                        "'" + args.pred + "' has no prediction for sample '" + id + "'");
        }
        pred.push_back(it->second);
    }

    const double acc = accuracy(pred, gold.gold);
    const ConfusionMatrix cm = confusion(pred, gold.gold);

    EchoConfig echo(sub);
    echo.add("--pred", args.pred);
    echo.add("--gold", args.gold);
    echo.add("--split-tag", args.split);

    json report = make_report("eval", echo);
    report["accuracy"] = acc;
    json counts = json::array();
    json normalized = json::array();
    for (int g = 0; g < kNumClasses; ++g) {
        counts.push_back(cm.counts[g]);
        normalized.push_back(cm.row_normalized[g]);
    }
    report["confusion_counts"] = std::move(counts);
    report["confusion_row_normalized"] = std::move(normalized);

    if (!args.out.empty()) write_output(args.out, report.dump(2) + "\n", args.force);

    if (args.pretty) {
        std::printf("accuracy: %.4f\n", acc);
        std::printf("row-normalized confusion (rows gold, columns predicted, class order "
                    "angry..surprise):\n");
        for (int g = 0; g < kNumClasses; ++g) {
            std::printf("%-9s", std::string(kClassDisplayNames[g]).c_str());
            for (int p = 0; p < kNumClasses; ++p) {
                std::printf(" %.2f", cm.row_normalized[g][p]);
            }
            std::printf("\n");
        }
    } else {
        emit(report);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradCheckArgs {
    std::string kind = "all";
    std::uint64_t seed = 1;
    int instances = 20;
    bool normalize = false;
    double perturb = 0.0;  // test hook
    bool pretty = false;
};

int run_gradcheck(const CLI::App* sub, const GradCheckArgs& args) {
    std::vector<AggKind> kinds;
    if (args.kind == "all") {
        kinds.assign(kAllAggKinds.begin(), kAllAggKinds.end());
    } else {
        kinds.push_back(parse_agg_kind(args.kind));
    }

    GradCheckSettings settings;
    settings.instances = args.instances;
    settings.normalize = args.normalize;
    settings.perturbation = args.perturb;

    EchoConfig echo(sub);
    echo.add("--kind", args.kind);
    echo.add("--seed", args.seed);
    echo.add("--instances", args.instances);
    echo.add("--normalize", args.normalize);

    bool all_pass = true;
    std::string worst_line;
    double worst_err = -1.0;
    json kinds_json = json::array();
    for (AggKind kind : kinds) {
        const GradCheckReport report = run_gradient_check(kind, args.seed, settings);
        json groups = json::array();
        for (const GradCheckGroup& g : report.groups) {
            groups.push_back(json{{"group", g.group},
                                  {"coordinates", g.coordinates},
                                  {"max_rel_error", g.max_rel_error},
                                  {"max_abs_error", g.max_abs_error},
                                  {"worst", g.worst},
                                  {"pass", g.pass}});
            if (!g.pass && g.max_rel_error > worst_err) {
                worst_err = g.max_rel_error;
                worst_line = std::string(agg_kind_name(kind)) + "/" + g.group + " " + g.worst;
            }
        }
        kinds_json.push_back(json{{"kind", agg_kind_name(kind)},
                                  {"groups", std::move(groups)},
                                  {"pass", report.pass}});
        all_pass = all_pass && report.pass;
    }

    json report = make_report("gradcheck", echo);
    report["kinds"] = std::move(kinds_json);
    report["pass"] = all_pass;

    if (args.pretty) {
        std::printf("%-10s %-16s %8s %12s  %s\n", "kind", "group", "coords", "max_rel", "pass");
        for (const auto& kind_entry : report["kinds"]) {
            for (const auto& g : kind_entry["groups"]) {
                std::printf("%-10s %-16s %8lld %12.3e  %s\n",
                            kind_entry["kind"].get<std::string>().c_str(),
                            g["group"].get<std::string>().c_str(),
                            static_cast<long long>(g["coordinates"].get<std::int64_t>()),
                            g["max_rel_error"].get<double>(),
                            g["pass"].get<bool>() ? "yes" : "NO");
            }
        }
    } else {
        emit(report);
    }
    if (!all_pass) {
        std::cerr << "gradient check failed, worst coordinate: " << worst_line << "\n";
        return 4;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// tfidf

struct TfIdfArgs {
    std::string corpus;
    std::string model;
    std::string lemma;
    std::int64_t min_freq = 3;
    bool l2 = false;
    std::string out;
    bool force = false;
};

std::vector<TokenList> load_tokenized(const std::string& corpus_path,
                                      const std::string& lemma_path) {
    const LemmaMap lemma = lemma_path.empty() ? LemmaMap{} : read_lemma_csv(lemma_path);
    std::vector<TokenList> docs;
    for (const std::string& line : read_corpus(corpus_path)) {
        docs.push_back(normalize_tokens(line, lemma));
    }
    return docs;
}

int run_tfidf_build(const CLI::App* sub, const TfIdfArgs& args) {
    const std::vector<TokenList> docs = load_tokenized(args.corpus, args.lemma);
    const TfIdfModel model = build_vocab(docs, args.min_freq);
    write_output(args.out, tfidf_model_to_json(model).dump(2) + "\n", args.force);

    EchoConfig echo(sub);
    echo.add("--corpus", args.corpus);
    echo.add("--lemma-map", args.lemma);
    echo.add("--min-freq", args.min_freq);
    echo.add("--out", args.out);

    json report = make_report("tfidf-build", echo);
    report["n_docs"] = model.n_docs;
    report["vocab_size"] = model.vocab.size();
    report["files"] = {{"model", args.out}};
    emit(report);
    return 0;
}

int run_tfidf_transform(const CLI::App* sub, const TfIdfArgs& args) {
    const TfIdfModel model = [&] {
        try {
            return tfidf_model_from_json(json::parse(read_text_file(args.model)));
        } catch (const json::exception& e) {
            throw Error(ErrorKind::BadData, "'" + args.model + "': " + e.what());
        }
    }();
    std::vector<std::string> column_token(model.vocab.size());
    for (const auto& [token, column] : model.vocab) column_token[column] = token;

    const std::vector<TokenList> docs = load_tokenized(args.corpus, args.lemma);
    std::string csv = "doc,token,weight\n";
    std::size_t nonzero = 0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& [column, weight] : tfidf_transform(model, docs[d], args.l2)) {
            csv += std::to_string(d) + "," + column_token[column] + "," + format_double(weight) +
                   "\n";
            ++nonzero;
        }
    }
    write_output(args.out, csv, args.force);

    EchoConfig echo(sub);
    echo.add("--model", args.model);
    echo.add("--corpus", args.corpus);
    echo.add("--lemma-map", args.lemma);
    echo.add("--l2", args.l2);
    echo.add("--out", args.out);

    json report = make_report("tfidf-transform", echo);
    report["n_docs"] = docs.size();
    report["nonzero_weights"] = nonzero;
    report["files"] = {{"weights", args.out}};
    emit(report);
    return 0;
}

// ---------------------------------------------------------------------------
// pool

struct PoolArgs {
    std::string kind;
    std::string in;
    std::string params;
    std::size_t clusters = 1;
    bool normalize = false;
    std::string out;
    bool force = false;
};

int run_pool(const CLI::App* sub, const PoolArgs& args) {
    const std::vector<NamedSequence> sequences = read_sequence_csv(args.in);
    const std::size_t dim = sequences.front().seq.dim;

    std::vector<std::pair<std::string, std::vector<double>>> pooled;
    if (args.kind == "mean" || args.kind == "max") {
        const Functional f = parse_functional(args.kind);
        for (const NamedSequence& s : sequences) pooled.emplace_back(s.id, pool(s.seq, f));
    } else {
        const AggKind kind = parse_agg_kind(args.kind);
        const ClusterParams params = [&] {
            if (!args.params.empty()) {
                try {
                    return cluster_params_from_json(json::parse(read_text_file(args.params)));
                } catch (const json::exception& e) {
                    throw Error(ErrorKind::BadData, "'" + args.params + "': " + e.what());
                }
            }
            return make_cluster_params(dim, args.clusters);
        }();
        const AggOptions options{args.normalize};
        for (const NamedSequence& s : sequences) {
            pooled.emplace_back(s.id,
                                aggregate_forward(kind, to_descriptors(s.seq), params, options));
        }
    }
    write_output(args.out, pooled_to_csv(pooled), args.force);

    EchoConfig echo(sub);
    echo.add("--kind", args.kind);
    echo.add("--in", args.in);
    echo.add("--params", args.params);
    echo.add("--clusters", args.clusters);
    echo.add("--normalize", args.normalize);
    echo.add("--out", args.out);

    json report = make_report("pool", echo);
    report["sequences"] = sequences.size();
    report["input_dim"] = dim;
    report["output_dim"] = pooled.front().second.size();
    report["files"] = {{"pooled", args.out}};
    emit(report);
    return 0;
}

// ---------------------------------------------------------------------------
// windows

struct WindowsArgs {
    std::string in;
    std::size_t window = 1;
    std::size_t overlap = 0;
    std::string out;
    bool force = false;
};

int run_windows(const CLI::App* sub, const WindowsArgs& args) {
    const std::vector<NamedSequence> sequences = read_sequence_csv(args.in);
    std::vector<NamedSequence> out;
    out.reserve(sequences.size());
    for (const NamedSequence& s : sequences) {
        out.push_back(NamedSequence{s.id, window_concat(s.seq, args.window, args.overlap)});
    }
    write_output(args.out, sequences_to_csv(out), args.force);

    EchoConfig echo(sub);
    echo.add("--in", args.in);
    echo.add("--window", args.window);
    echo.add("--overlap", args.overlap);
    echo.add("--out", args.out);

    json report = make_report("windows", echo);
    report["sequences"] = out.size();
    report["output_dim"] = out.front().seq.dim;
    report["files"] = {{"windows", args.out}};
    emit(report);
    return 0;
}

// ---------------------------------------------------------------------------
// train-toy

struct TrainToyArgs {
    std::string kind = "netvlad";
    std::string seqs;
    std::string labels;
    std::size_t clusters = 2;
    int epochs = 12;
    double lr = 0.05;
    std::uint64_t seed = 11;
    bool normalize = false;
    std::string out_history;
    std::string save_params;
    bool force = false;
};

int run_train_toy(const CLI::App* sub, const TrainToyArgs& args) {
    const AggKind kind = parse_agg_kind(args.kind);
    const std::vector<NamedSequence> sequences = read_sequence_csv(args.seqs);
    const LabeledSet labels = read_gold_csv(args.labels, Split::Train);
    std::map<std::string, Emotion> label_of;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        label_of[labels.sample_ids[i]] = labels.gold[i];
    }
    std::vector<LabeledSequence> data;
    for (const NamedSequence& s : sequences) {
        auto it = label_of.find(s.id);
        if (it == label_of.end()) {
            throw Error(ErrorKind::MissingSample,
                        "'" + args.labels + "' has no label for sequence '" + s.id + "'");
        }
        data.push_back(LabeledSequence{s.id, to_descriptors(s.seq),
                                       static_cast<int>(it->second)});
    }

    const ToyTrainResult result = train_toy(kind, data, args.clusters, args.epochs, args.lr,
                                            args.seed, AggOptions{args.normalize});

    EchoConfig echo(sub);
    echo.add("--kind", args.kind);
    echo.add("--seqs", args.seqs);
    echo.add("--labels", args.labels);
    echo.add("--clusters", args.clusters);
    echo.add("--epochs", args.epochs);
    echo.add("--lr", args.lr);
    echo.add("--seed", args.seed);
    echo.add("--normalize", args.normalize);

    json history = json::array();
    for (std::size_t e = 0; e < result.history.size(); ++e) {
        history.push_back(json{{"epoch", e},
                               {"loss", result.history[e].loss},
                               {"accuracy", result.history[e].accuracy}});
    }
    json report = make_report("train-toy", echo);
    report["history"] = history;
    report["final_accuracy"] = result.history.back().accuracy;
    report["final_loss"] = result.history.back().loss;

    json files = json::object();
    if (!args.out_history.empty()) {
        json payload = {{"format_version", "1"}, {"history", history}};
        write_output(args.out_history, payload.dump(2) + "\n", args.force);
        files["history"] = args.out_history;
    }
    if (!args.save_params.empty()) {
        write_output(args.save_params, cluster_params_to_json(result.params).dump(2) + "\n",
                     args.force);
        files["params"] = args.save_params;
    }
    if (!files.empty()) report["files"] = files;
    emit(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    g_argv.assign(argv + 1, argv + argc);

    CLI::App app{"late fusion and trainable sequence-pooling toolkit"};
    app.require_subcommand(1);

    GenBankArgs gen_bank_args;
    CLI::App* gen_bank_cmd =
        app.add_subcommand("gen-bank", "generate a synthetic score-matrix bank");
    gen_bank_cmd->set_config("--config");
    gen_bank_cmd->add_option("--models", gen_bank_args.models, "number of models");
    gen_bank_cmd->add_option("--samples", gen_bank_args.samples, "number of samples");
    gen_bank_cmd->add_option("--acc", gen_bank_args.acc,
                             "target accuracy, one value or one per model");
    gen_bank_cmd->add_option("--noise", gen_bank_args.noise, "logit noise scale");
    gen_bank_cmd->add_option("--sharpness", gen_bank_args.sharpness, "target logit");
    gen_bank_cmd->add_option("--prior", gen_bank_args.prior,
                             "class prior: uniform, afew-train or 7 values");
    gen_bank_cmd->add_option("--shared-noise", gen_bank_args.shared_noise,
                             "noise correlation across models, in [0,1)");
    gen_bank_cmd->add_option("--seed", gen_bank_args.seed, "random seed");
    gen_bank_cmd->add_option("--split-tag", gen_bank_args.split, "split tag for the gold file");
    gen_bank_cmd->add_option("--out", gen_bank_args.out, "output directory")->required();
    gen_bank_cmd->add_flag("--force", gen_bank_args.force, "overwrite existing files");

    GenSeqsArgs gen_seqs_args;
    CLI::App* gen_seqs_cmd =
        app.add_subcommand("gen-seqs", "generate a two-class descriptor-sequence task");
    gen_seqs_cmd->set_config("--config");
    gen_seqs_cmd->add_option("--per-class", gen_seqs_args.per_class, "sequences per class");
    gen_seqs_cmd->add_option("--len-min", gen_seqs_args.len_min, "minimum descriptors");
    gen_seqs_cmd->add_option("--len-max", gen_seqs_args.len_max, "maximum descriptors");
    gen_seqs_cmd->add_option("--dim", gen_seqs_args.dim, "descriptor dimension");
    gen_seqs_cmd->add_option("--sep", gen_seqs_args.sep, "class mean separation");
    gen_seqs_cmd->add_option("--seed", gen_seqs_args.seed, "random seed");
    gen_seqs_cmd->add_option("--out", gen_seqs_args.out, "output directory")->required();
    gen_seqs_cmd->add_flag("--force", gen_seqs_args.force, "overwrite existing files");

    FuseArgs fuse_args;
    CLI::App* fuse_cmd = app.add_subcommand("fuse", "fuse score files against gold labels");
    fuse_cmd->set_config("--config");
    fuse_cmd->add_option("--method", fuse_args.method, "bs, mean, weighted, vote or oracle")
        ->required();
    fuse_cmd->add_option("--scores", fuse_args.scores, "score csv files, one per model")
        ->required()
        ->expected(-1);
    fuse_cmd->add_option("--gold", fuse_args.gold, "gold label csv")->required();
    fuse_cmd->add_option("--split-tag", fuse_args.split, "split tag of the gold file");
    fuse_cmd->add_option("--k", fuse_args.beam_width, "beam width for bs");
    fuse_cmd->add_option("--guard", fuse_args.guard, "model-count guard for oracle");
    fuse_cmd->add_option("--weights", fuse_args.weights,
                         "comma list aligned with --scores, for weighted");
    fuse_cmd->add_option("--out-report", fuse_args.out_report, "also write the report here");
    fuse_cmd->add_option("--out-fused", fuse_args.out_fused,
                         "write fused scores (labels for vote) here");
    fuse_cmd->add_flag("--force", fuse_args.force, "overwrite existing files");

    EvalArgs eval_args;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "accuracy and confusion of predictions against gold");
    eval_cmd->set_config("--config");
    eval_cmd->add_option("--pred", eval_args.pred, "score csv or label csv")->required();
    eval_cmd->add_option("--gold", eval_args.gold, "gold label csv")->required();
    eval_cmd->add_option("--split-tag", eval_args.split, "split tag of the gold file");
    eval_cmd->add_option("--out", eval_args.out, "also write the JSON report here");
    eval_cmd->add_flag("--pretty", eval_args.pretty, "print the confusion table instead of JSON");
    eval_cmd->add_flag("--force", eval_args.force, "overwrite existing files");

    GradCheckArgs gradcheck_args;
    CLI::App* gradcheck_cmd =
        app.add_subcommand("gradcheck", "finite-difference check of aggregation gradients");
    gradcheck_cmd->set_config("--config");
    gradcheck_cmd->add_option("--kind", gradcheck_args.kind,
                              "netvlad, netrvlad, softdbow, netfv or all");
    gradcheck_cmd->add_option("--seed", gradcheck_args.seed, "random seed");
    gradcheck_cmd->add_option("--instances", gradcheck_args.instances, "instances per kind");
    gradcheck_cmd->add_flag("--normalize", gradcheck_args.normalize,
                            "check the normalized forward pass");
    gradcheck_cmd
        ->add_option("--perturb", gradcheck_args.perturb,
                     "test hook: offset added to every analytic gradient")
        ->group("");  // hidden
    gradcheck_cmd->add_flag("--pretty", gradcheck_args.pretty, "print a table instead of JSON");

    TfIdfArgs tfidf_args;
    CLI::App* tfidf_cmd = app.add_subcommand("tfidf", "tf-idf over one-document-per-line text");
    tfidf_cmd->require_subcommand(1);
    CLI::App* tfidf_build_cmd = tfidf_cmd->add_subcommand("build", "build a vocabulary model");
    tfidf_build_cmd->set_config("--config");
    tfidf_build_cmd->add_option("--corpus", tfidf_args.corpus, "corpus file")->required();
    tfidf_build_cmd->add_option("--lemma-map", tfidf_args.lemma, "surface,prototype csv");
    tfidf_build_cmd->add_option("--min-freq", tfidf_args.min_freq,
                                "minimum corpus frequency to keep a token");
    tfidf_build_cmd->add_option("--out", tfidf_args.out, "model json path")->required();
    tfidf_build_cmd->add_flag("--force", tfidf_args.force, "overwrite existing files");
    CLI::App* tfidf_transform_cmd =
        tfidf_cmd->add_subcommand("transform", "weigh documents with a built model");
    tfidf_transform_cmd->set_config("--config");
    tfidf_transform_cmd->add_option("--model", tfidf_args.model, "model json path")->required();
    tfidf_transform_cmd->add_option("--corpus", tfidf_args.corpus, "documents to weigh")
        ->required();
    tfidf_transform_cmd->add_option("--lemma-map", tfidf_args.lemma, "surface,prototype csv");
    tfidf_transform_cmd->add_flag("--l2", tfidf_args.l2, "L2-normalize each document row");
    tfidf_transform_cmd->add_option("--out", tfidf_args.out, "weights csv path")->required();
    tfidf_transform_cmd->add_flag("--force", tfidf_args.force, "overwrite existing files");

    PoolArgs pool_args;
    CLI::App* pool_cmd =
        app.add_subcommand("pool", "collapse sequences to fixed vectors (mean/max/aggregation)");
    pool_cmd->set_config("--config");
    pool_cmd->add_option("--kind", pool_args.kind,
                         "mean, max, netvlad, netrvlad, softdbow or netfv")
        ->required();
    pool_cmd->add_option("--in", pool_args.in, "sequence csv")->required();
    pool_cmd->add_option("--params", pool_args.params, "cluster parameter checkpoint json");
    pool_cmd->add_option("--clusters", pool_args.clusters,
                         "clusters for default-initialized parameters");
    pool_cmd->add_flag("--normalize", pool_args.normalize, "per-cluster then global L2");
    pool_cmd->add_option("--out", pool_args.out, "pooled csv path")->required();
    pool_cmd->add_flag("--force", pool_args.force, "overwrite existing files");

    WindowsArgs windows_args;
    CLI::App* windows_cmd =
        app.add_subcommand("windows", "concatenate sliding windows of sequence frames");
    windows_cmd->set_config("--config");
    windows_cmd->add_option("--in", windows_args.in, "sequence csv")->required();
    windows_cmd->add_option("--window", windows_args.window, "frames per window");
    windows_cmd->add_option("--overlap", windows_args.overlap, "overlapping frames");
    windows_cmd->add_option("--out", windows_args.out, "output sequence csv")->required();
    windows_cmd->add_flag("--force", windows_args.force, "overwrite existing files");

    TrainToyArgs train_args;
    CLI::App* train_cmd =
        app.add_subcommand("train-toy", "train an aggregation descriptor with a linear head");
    train_cmd->set_config("--config");
    train_cmd->add_option("--kind", train_args.kind, "aggregation kind");
    train_cmd->add_option("--seqs", train_args.seqs, "sequence csv")->required();
    train_cmd->add_option("--labels", train_args.labels, "label csv (sample_id,label)")
        ->required();
    train_cmd->add_option("--clusters", train_args.clusters, "cluster count");
    train_cmd->add_option("--epochs", train_args.epochs, "training epochs");
    train_cmd->add_option("--lr", train_args.lr, "learning rate");
    train_cmd->add_option("--seed", train_args.seed, "shuffle seed");
    train_cmd->add_flag("--normalize", train_args.normalize, "train on normalized outputs");
    train_cmd->add_option("--out-history", train_args.out_history, "write metric history json");
    train_cmd->add_option("--save-params", train_args.save_params, "write parameter checkpoint");
    train_cmd->add_flag("--force", train_args.force, "overwrite existing files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen_bank_cmd->parsed()) return run_gen_bank(gen_bank_cmd, gen_bank_args);
        if (gen_seqs_cmd->parsed()) return run_gen_seqs(gen_seqs_cmd, gen_seqs_args);
        if (fuse_cmd->parsed()) return run_fuse(fuse_cmd, fuse_args);
        if (eval_cmd->parsed()) return run_eval(eval_cmd, eval_args);
        if (gradcheck_cmd->parsed()) return run_gradcheck(gradcheck_cmd, gradcheck_args);
        if (tfidf_cmd->parsed()) {
            if (tfidf_build_cmd->parsed()) return run_tfidf_build(tfidf_build_cmd, tfidf_args);
            return run_tfidf_transform(tfidf_transform_cmd, tfidf_args);
        }
        if (pool_cmd->parsed()) return run_pool(pool_cmd, pool_args);
        if (windows_cmd->parsed()) return run_windows(windows_cmd, windows_args);
        if (train_cmd->parsed()) return run_train_toy(train_cmd, train_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::InvalidSpec ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
