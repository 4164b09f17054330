// File formats. All text, UTF-8, LF line endings, '.' decimal separator.
//
//   score file     sample_id,angry,disgust,fear,happy,neutral,sad,surprise
//   gold file      sample_id,label            (lowercase canonical names)
//   sequence file  seq_id,t,f0..f{D-1}        (t consecutive from 0 per id)
//   lemma map      surface,prototype
//   corpus         one document per line
//   embeddings     token then D space-separated decimals per line
//   checkpoint     JSON with explicit shapes and a format_version field
//
// Doubles are written in shortest round-trip form, so write(read(x)) == x
// byte for byte on files this library produced.
#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "latefuse/aggregation.hpp"
#include "latefuse/common.hpp"
#include "latefuse/core.hpp"
#include "latefuse/sequence.hpp"
#include "latefuse/text.hpp"

namespace latefuse {

inline constexpr std::string_view kScoreCsvHeader =
    "sample_id,angry,disgust,fear,happy,neutral,sad,surprise";
inline constexpr std::string_view kGoldCsvHeader = "sample_id,label";
inline constexpr std::string_view kLemmaCsvHeader = "surface,prototype";
inline constexpr std::string_view kCheckpointFormatVersion = "1";

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path + "'");
}

namespace detail {

// Splits into lines, tolerating CRLF input and a missing final newline.
inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t end = line.find(',', start);
        if (end == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, end - start));
        start = end + 1;
    }
    return fields;
}

inline void expect_header(std::string_view got, std::string_view want, const std::string& path) {
    if (got != want) {
        throw Error(ErrorKind::BadData, "'" + path + "': expected header '" + std::string(want) +
                                            "', got '" + std::string(got) + "'");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// score files

inline std::string score_matrix_to_csv(const ScoreMatrix& m) {
    std::string out(kScoreCsvHeader);
    out.push_back('\n');
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out += m.sample_ids[i];
        for (int c = 0; c < kNumClasses; ++c) {
            out.push_back(',');
            out += format_double(m.at(i, c));
        }
        out.push_back('\n');
    }
    return out;
}

inline ScoreMatrix parse_score_csv(std::string_view content, const std::string& model_id,
                                   const std::string& path,
                                   std::vector<std::string>* warnings = nullptr) {
    const auto lines = detail::split_lines(content);
    if (lines.empty()) throw Error(ErrorKind::BadData, "'" + path + "' is empty");
    detail::expect_header(lines[0], kScoreCsvHeader, path);
    std::vector<std::string> ids;
    std::vector<double> scores;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto fields = detail::split_csv(lines[li]);
        if (fields.size() != 1 + kNumClasses) {
            throw Error(ErrorKind::BadData, "'" + path + "' line " + std::to_string(li + 1) +
                                                ": expected 8 fields, got " +
                                                std::to_string(fields.size()));
        }
        ids.emplace_back(fields[0]);
        for (int c = 0; c < kNumClasses; ++c) scores.push_back(parse_double(fields[1 + c]));
    }
    return make_score_matrix(model_id, std::move(ids), std::move(scores), warnings);
}

inline ScoreMatrix read_score_csv(const std::string& path, const std::string& model_id,
                                  std::vector<std::string>* warnings = nullptr) {
    return parse_score_csv(read_text_file(path), model_id, path, warnings);
}

// Model id used when loading a score file: the file name without extension.
inline std::string model_id_from_path(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

// ---------------------------------------------------------------------------
// gold label files

inline std::string labeled_set_to_csv(const LabeledSet& set) {
    std::string out(kGoldCsvHeader);
    out.push_back('\n');
    for (std::size_t i = 0; i < set.size(); ++i) {
        out += set.sample_ids[i];
        out.push_back(',');
        out += class_name(set.gold[i]);
        out.push_back('\n');
    }
    return out;
}

inline LabeledSet parse_gold_csv(std::string_view content, Split split, const std::string& path) {
    const auto lines = detail::split_lines(content);
    if (lines.empty()) throw Error(ErrorKind::BadData, "'" + path + "' is empty");
    detail::expect_header(lines[0], kGoldCsvHeader, path);
    std::vector<std::string> ids;
    std::vector<Emotion> gold;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto fields = detail::split_csv(lines[li]);
        if (fields.size() != 2) {
            throw Error(ErrorKind::BadData, "'" + path + "' line " + std::to_string(li + 1) +
                                                ": expected 2 fields");
        }
        ids.emplace_back(fields[0]);
        gold.push_back(parse_label(fields[1]));
    }
    if (ids.empty()) throw Error(ErrorKind::BadData, "'" + path + "' has no label rows");
    return make_labeled_set(std::move(ids), std::move(gold), split);
}

inline LabeledSet read_gold_csv(const std::string& path, Split split = Split::Val) {
    return parse_gold_csv(read_text_file(path), split, path);
}

// ---------------------------------------------------------------------------
// sequence files

struct NamedSequence {
    std::string id;
    FeatureSequence seq;
};

inline std::string sequence_csv_header(std::size_t dim) {
    std::string header = "seq_id,t";
    for (std::size_t j = 0; j < dim; ++j) header += ",f" + std::to_string(j);
    return header;
}

inline std::string sequences_to_csv(const std::vector<NamedSequence>& sequences) {
    if (sequences.empty()) throw Error(ErrorKind::EmptyInput, "no sequences to write");
    const std::size_t dim = sequences.front().seq.dim;
    std::string out = sequence_csv_header(dim);
    out.push_back('\n');
    for (const NamedSequence& s : sequences) {
        if (s.seq.dim != dim) {
            throw Error(ErrorKind::ShapeMismatch, "sequences disagree on feature dim");
        }
        for (std::size_t t = 0; t < s.seq.length(); ++t) {
            out += s.id;
            out.push_back(',');
            out += std::to_string(t);
            const double* frame = s.seq.frame(t);
            for (std::size_t j = 0; j < dim; ++j) {
                out.push_back(',');
                out += format_double(frame[j]);
            }
            out.push_back('\n');
        }
    }
    return out;
}

// Rows of one sequence must be contiguous with t counting up from 0; this
// keeps read/write round trips exact.
inline std::vector<NamedSequence> parse_sequence_csv(std::string_view content,
                                                     const std::string& path) {
    const auto lines = detail::split_lines(content);
    if (lines.empty()) throw Error(ErrorKind::BadData, "'" + path + "' is empty");
    const auto header = detail::split_csv(lines[0]);
    if (header.size() < 3 || header[0] != "seq_id" || header[1] != "t") {
        throw Error(ErrorKind::BadData, "'" + path + "': bad sequence header");
    }
    const std::size_t dim = header.size() - 2;
    for (std::size_t j = 0; j < dim; ++j) {
        if (header[2 + j] != "f" + std::to_string(j)) {
            throw Error(ErrorKind::BadData, "'" + path + "': bad sequence header");
        }
    }
    std::vector<NamedSequence> out;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto fields = detail::split_csv(lines[li]);
        if (fields.size() != 2 + dim) {
            throw Error(ErrorKind::BadData, "'" + path + "' line " + std::to_string(li + 1) +
                                                ": expected " + std::to_string(2 + dim) +
                                                " fields");
        }
        const std::string id(fields[0]);
        if (out.empty() || out.back().id != id) {
            for (const NamedSequence& prev : out) {
                if (prev.id == id) {
                    throw Error(ErrorKind::BadData,
                                "'" + path + "': rows of sequence '" + id + "' are not contiguous");
                }
            }
            out.push_back(NamedSequence{id, FeatureSequence{dim, {}}});
        }
        NamedSequence& current = out.back();
        const std::int64_t t = parse_int(fields[1]);
        if (t != static_cast<std::int64_t>(current.seq.length())) {
            throw Error(ErrorKind::BadData, "'" + path + "' line " + std::to_string(li + 1) +
                                                ": expected t=" +
                                                std::to_string(current.seq.length()));
        }
        for (std::size_t j = 0; j < dim; ++j) {
            current.seq.frames.push_back(parse_double(fields[2 + j]));
        }
    }
    if (out.empty()) throw Error(ErrorKind::BadData, "'" + path + "' has no sequence rows");
    for (const NamedSequence& s : out) require_finite(s.seq.frames, "sequence file");
    return out;
}

inline std::vector<NamedSequence> read_sequence_csv(const std::string& path) {
    return parse_sequence_csv(read_text_file(path), path);
}

inline DescriptorSequence to_descriptors(const FeatureSequence& seq) {
    return DescriptorSequence{seq.dim, seq.frames};
}

// ---------------------------------------------------------------------------
// pooled vectors

inline std::string pooled_to_csv(const std::vector<std::pair<std::string, std::vector<double>>>&
                                     rows) {
    if (rows.empty()) throw Error(ErrorKind::EmptyInput, "no pooled vectors to write");
    const std::size_t dim = rows.front().second.size();
    std::string out = "seq_id";
    for (std::size_t j = 0; j < dim; ++j) out += ",v" + std::to_string(j);
    out.push_back('\n');
    for (const auto& [id, values] : rows) {
        out += id;
        for (double v : values) {
            out.push_back(',');
            out += format_double(v);
        }
        out.push_back('\n');
    }
    return out;
}

// ---------------------------------------------------------------------------
// text inputs

inline std::vector<std::string> parse_corpus(std::string_view content) {
    std::vector<std::string> docs;
    for (std::string_view line : detail::split_lines(content)) docs.emplace_back(line);
    return docs;
}

inline std::vector<std::string> read_corpus(const std::string& path) {
    auto docs = parse_corpus(read_text_file(path));
    if (docs.empty()) throw Error(ErrorKind::EmptyCorpus, "'" + path + "' has no documents");
    return docs;
}

inline LemmaMap parse_lemma_csv(std::string_view content, const std::string& path) {
    const auto lines = detail::split_lines(content);
    if (lines.empty()) throw Error(ErrorKind::BadData, "'" + path + "' is empty");
    detail::expect_header(lines[0], kLemmaCsvHeader, path);
    LemmaMap map;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto fields = detail::split_csv(lines[li]);
        if (fields.size() != 2) {
            throw Error(ErrorKind::BadData, "'" + path + "' line " + std::to_string(li + 1) +
                                                ": expected 2 fields");
        }
        map[std::string(fields[0])] = std::string(fields[1]);
    }
    return map;
}

inline LemmaMap read_lemma_csv(const std::string& path) {
    return parse_lemma_csv(read_text_file(path), path);
}

inline EmbeddingTable parse_embeddings(std::string_view content, const std::string& path) {
    EmbeddingTable table;
    for (std::string_view line : detail::split_lines(content)) {
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (start < line.size()) {
            std::size_t end = line.find(' ', start);
            if (end == std::string_view::npos) end = line.size();
            if (end > start) fields.push_back(line.substr(start, end - start));
            start = end + 1;
        }
        if (fields.size() < 2) {
            throw Error(ErrorKind::BadData, "'" + path + "': embedding line needs a token and values");
        }
        std::vector<double> values;
        values.reserve(fields.size() - 1);
        for (std::size_t i = 1; i < fields.size(); ++i) values.push_back(parse_double(fields[i]));
        if (table.dim == 0) {
            table.dim = values.size();
        } else if (values.size() != table.dim) {
            throw Error(ErrorKind::BadData, "'" + path + "': embedding dimensions disagree");
        }
        require_finite(values, "embedding");
        if (!table.vectors.emplace(std::string(fields[0]), std::move(values)).second) {
            throw Error(ErrorKind::BadData,
                        "'" + path + "': duplicate token '" + std::string(fields[0]) + "'");
        }
    }
    if (table.vectors.empty()) {
        throw Error(ErrorKind::BadData, "'" + path + "' has no embeddings");
    }
    return table;
}

inline EmbeddingTable read_embeddings(const std::string& path) {
    return parse_embeddings(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// parameter checkpoints and TF-IDF models (JSON)

inline nlohmann::json cluster_params_to_json(const ClusterParams& p) {
    const auto matrix = [&](const std::vector<double>& values) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t k = 0; k < p.clusters; ++k) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t j = 0; j < p.dim; ++j) row.push_back(values[k * p.dim + j]);
            rows.push_back(std::move(row));
        }
        return rows;
    };
    return nlohmann::json{{"format_version", kCheckpointFormatVersion},
                          {"dim", p.dim},
                          {"clusters", p.clusters},
                          {"anchors", matrix(p.anchors)},
                          {"assign_weights", matrix(p.assign_weights)},
                          {"assign_bias", p.assign_bias},
                          {"sigma_raw", matrix(p.sigma_raw)}};
}

inline ClusterParams cluster_params_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<std::string>() != kCheckpointFormatVersion) {
            throw Error(ErrorKind::BadData, "unsupported checkpoint format_version");
        }
        ClusterParams p = make_cluster_params(j.at("dim").get<std::size_t>(),
                                              j.at("clusters").get<std::size_t>());
        const auto matrix = [&](const char* key, std::vector<double>& out) {
            const nlohmann::json& rows = j.at(key);
            if (rows.size() != p.clusters) {
                throw Error(ErrorKind::ShapeMismatch, std::string(key) + " has wrong row count");
            }
            for (std::size_t k = 0; k < p.clusters; ++k) {
                if (rows[k].size() != p.dim) {
                    throw Error(ErrorKind::ShapeMismatch,
                                std::string(key) + " row has wrong length");
                }
                for (std::size_t jj = 0; jj < p.dim; ++jj) {
                    out[k * p.dim + jj] = rows[k][jj].get<double>();
                }
            }
        };
        matrix("anchors", p.anchors);
        matrix("assign_weights", p.assign_weights);
        matrix("sigma_raw", p.sigma_raw);
        const nlohmann::json& bias = j.at("assign_bias");
        if (bias.size() != p.clusters) {
            throw Error(ErrorKind::ShapeMismatch, "assign_bias has wrong length");
        }
        for (std::size_t k = 0; k < p.clusters; ++k) p.assign_bias[k] = bias[k].get<double>();
        validate_params(p);
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadData, std::string("bad checkpoint: ") + e.what());
    }
}

inline nlohmann::json tfidf_model_to_json(const TfIdfModel& model) {
    nlohmann::json vocab = nlohmann::json::array();
    for (const auto& [token, column] : model.vocab) {
        vocab.push_back(nlohmann::json{{"token", token}, {"df", model.df[column]}});
    }
    return nlohmann::json{{"format_version", kCheckpointFormatVersion},
                          {"min_freq", model.min_freq},
                          {"n_docs", model.n_docs},
                          {"vocab", std::move(vocab)}};
}

inline TfIdfModel tfidf_model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<std::string>() != kCheckpointFormatVersion) {
            throw Error(ErrorKind::BadData, "unsupported model format_version");
        }
        TfIdfModel model;
        model.min_freq = j.at("min_freq").get<std::int64_t>();
        model.n_docs = j.at("n_docs").get<std::int64_t>();
        for (const auto& entry : j.at("vocab")) {
            const std::string token = entry.at("token").get<std::string>();
            if (!model.vocab.emplace(token, 0).second) {
                throw Error(ErrorKind::BadData, "duplicate vocab token '" + token + "'");
            }
        }
        model.df.assign(model.vocab.size(), 0);
        std::size_t column = 0;
        for (auto& [token, index] : model.vocab) index = column++;
        for (const auto& entry : j.at("vocab")) {
            const std::string token = entry.at("token").get<std::string>();
            model.df[model.vocab.at(token)] = entry.at("df").get<std::int64_t>();
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadData, std::string("bad tf-idf model: ") + e.what());
    }
}

}  // namespace latefuse
