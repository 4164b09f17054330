// Bag-of-words text features: token normalization through an external lemma
// table, vocabulary construction with a minimum corpus-frequency cut,
// smoothed TF-IDF weights, and pooled word-vector lookups.
//
// The weight of token t in document d is
//
//   tfidf(t, d) = count(t, d) * (ln((1 + n_docs) / (1 + df(t))) + 1)
//
// with natural logarithm and raw counts; df(t) <= n_docs, so every in-vocab
// token has idf >= 1.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "latefuse/common.hpp"
#include "latefuse/sequence.hpp"

namespace latefuse {

using LemmaMap = std::unordered_map<std::string, std::string>;
using TokenList = std::vector<std::string>;

// Lowercase, split on non-alphanumeric runs, map tokens to their prototype.
inline TokenList normalize_tokens(std::string_view text, const LemmaMap& lemma_map) {
    TokenList tokens;
    std::string current;
    const auto flush = [&]() {
        if (current.empty()) return;
        auto it = lemma_map.find(current);
        tokens.push_back(it == lemma_map.end() ? current : it->second);
        current.clear();
    };
    for (unsigned char ch : text) {
        if (std::isalnum(ch)) {
            current.push_back(static_cast<char>(std::tolower(ch)));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

struct TfIdfModel {
    std::map<std::string, std::size_t> vocab;  // token -> column, lexicographic order
    std::vector<std::int64_t> df;              // documents containing the token
    std::int64_t n_docs = 0;
    std::int64_t min_freq = 3;

    double idf(std::size_t column) const {
        return std::log(static_cast<double>(1 + n_docs) / static_cast<double>(1 + df[column])) +
               1.0;
    }
};

// Keeps tokens whose total corpus count reaches min_freq; document frequency
// is counted per document, term frequency later per occurrence.
inline TfIdfModel build_vocab(const std::vector<TokenList>& docs, std::int64_t min_freq = 3) {
    if (docs.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot build a vocabulary of no documents");
    if (min_freq < 1) throw Error(ErrorKind::InvalidSpec, "min_freq must be >= 1");
    std::unordered_map<std::string, std::int64_t> corpus_count;
    std::unordered_map<std::string, std::int64_t> doc_count;
    for (const TokenList& doc : docs) {
        std::unordered_set<std::string_view> seen;
        for (const std::string& token : doc) {
            corpus_count[token] += 1;
            if (seen.insert(token).second) doc_count[token] += 1;
        }
    }
    TfIdfModel model;
    model.n_docs = static_cast<std::int64_t>(docs.size());
    model.min_freq = min_freq;
    for (const auto& [token, count] : corpus_count) {
        if (count >= min_freq) model.vocab.emplace(token, 0);
    }
    model.df.reserve(model.vocab.size());
    std::size_t column = 0;
    for (auto& [token, index] : model.vocab) {
        index = column++;
        model.df.push_back(doc_count.at(token));
    }
    return model;
}

// Sparse row over the vocabulary, sorted by column. Out-of-vocab tokens are
// ignored. L2 normalization is optional and off by default.
inline std::vector<std::pair<std::size_t, double>> tfidf_transform(const TfIdfModel& model,
                                                                   const TokenList& doc,
                                                                   bool l2_normalize = false) {
    std::map<std::size_t, double> weights;
    for (const std::string& token : doc) {
        auto it = model.vocab.find(token);
        if (it == model.vocab.end()) continue;
        weights[it->second] += 1.0;  // raw term frequency
    }
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(weights.size());
    double sq = 0.0;
    for (auto& [column, tf] : weights) {
        const double w = tf * model.idf(column);
        sq += w * w;
        out.emplace_back(column, w);
    }
    if (l2_normalize && sq > 0.0) {
        const double norm = std::sqrt(sq);
        for (auto& [column, w] : out) w /= norm;
    }
    return out;
}

struct EmbeddingTable {
    std::size_t dim = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;
};

// Coordinatewise mean or max over the embeddings of in-table tokens.
inline std::vector<double> embed_pool(const TokenList& tokens, const EmbeddingTable& table,
                                      Functional functional) {
    std::vector<double> out;
    std::size_t used = 0;
    for (const std::string& token : tokens) {
        auto it = table.vectors.find(token);
        if (it == table.vectors.end()) continue;
        const std::vector<double>& v = it->second;
        if (used == 0) {
            out = v;
        } else if (functional == Functional::Mean) {
            for (std::size_t j = 0; j < out.size(); ++j) out[j] += v[j];
        } else {
            for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::max(out[j], v[j]);
        }
        ++used;
    }
    if (used == 0) {
        throw Error(ErrorKind::NoKnownTokens, "no token of the input is in the embedding table");
    }
    if (functional == Functional::Mean) {
        for (double& v : out) v /= static_cast<double>(used);
    }
    return out;
}

}  // namespace latefuse
