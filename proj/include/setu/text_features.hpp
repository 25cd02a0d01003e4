// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "setu/detail/io.hpp"
#include "setu/detail/utf8.hpp"
#include "setu/error.hpp"

namespace setu {

using TokenList = std::vector<std::string>;

inline constexpr std::size_t kDefaultEmbeddingDim = 100;
inline constexpr const char* kTextModelVersion = "tf-rawidf-meanemb-v1";

// ---------------------------------------------------------------------------
// Segmentation
// ---------------------------------------------------------------------------

/// Optional lexicon of multi-character CJK words. Runs of CJK characters are
/// segmented by forward maximum matching against it; characters not covered
/// by a lexicon word become single-character tokens.
struct SegmentationConfig {
    std::unordered_set<std::string> lexicon;
    std::size_t max_word_chars = 1;

    void add_word(const std::string& word) {
        std::size_t pos = 0;
        std::size_t chars = 0;
        while (pos < word.size()) {
            detail::next_code_point(word, pos);
            ++chars;
        }
        if (chars == 0) {
            return;
        }
        lexicon.insert(word);
        max_word_chars = std::max(max_word_chars, chars);
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline std::string ascii_lower(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return s;
}

inline void segment_cjk_run(const std::vector<std::string>& chars, const SegmentationConfig& config,
                            TokenList& out) {
    std::size_t i = 0;
    while (i < chars.size()) {
        std::size_t taken = 1;
        const std::size_t longest = std::min(config.max_word_chars, chars.size() - i);
        for (std::size_t len = longest; len >= 2; --len) {
            std::string candidate;
            for (std::size_t k = 0; k < len; ++k) {
                candidate += chars[i + k];
            }
            if (config.lexicon.contains(candidate)) {
                out.push_back(std::move(candidate));
                taken = len;
                break;
            }
        }
        if (taken == 1) {
            out.push_back(chars[i]);
        }
        i += taken;
    }
}

}  // namespace detail

inline SegmentationConfig load_segmentation(const std::filesystem::path& path) {
    SegmentationConfig config;
    for (const auto& line : detail::split_lines(detail::read_text_file(path))) {
        const std::string word = detail::trim(line);
        if (!word.empty()) {
            config.add_word(word);
        }
    }
    return config;
}

/// Splits on Unicode whitespace and punctuation, lowercases ASCII letters
/// and emits CJK characters as separate tokens (or lexicon words).
[[nodiscard]] inline TokenList tokenize(std::string_view text, const SegmentationConfig& config = {}) {
    TokenList out;
    std::string word;
    std::vector<std::string> cjk_run;

    const auto flush_word = [&] {
        if (!word.empty()) {
            out.push_back(std::move(word));
            word.clear();
        }
    };
    const auto flush_cjk = [&] {
        if (!cjk_run.empty()) {
            detail::segment_cjk_run(cjk_run, config, out);
            cjk_run.clear();
        }
    };

    std::size_t pos = 0;
    while (pos < text.size()) {
        const char32_t cp = detail::next_code_point(text, pos);
        if (detail::is_unicode_space(cp) || detail::is_punctuation(cp)) {
            flush_word();
            flush_cjk();
        } else if (detail::is_cjk(cp)) {
            flush_word();
            std::string ch;
            detail::append_utf8(ch, cp);
            cjk_run.push_back(std::move(ch));
        } else {
            flush_cjk();
            if (cp >= 'A' && cp <= 'Z') {
                word.push_back(static_cast<char>(cp - 'A' + 'a'));
            } else {
                detail::append_utf8(word, cp);
            }
        }
    }
    flush_word();
    flush_cjk();
    return out;
}

// ---------------------------------------------------------------------------
// Stopwords and synonyms
// ---------------------------------------------------------------------------

using StopwordSet = std::unordered_set<std::string>;

/// Variant -> canonical map. Chains (a -> b, b -> c) resolve to the final
/// canonical form, so canonicalization is idempotent. Cycles are rejected
/// when the closing entry is added.
class SynonymMap {
public:
    SynonymMap() = default;

    void add(const std::string& canonical, const std::string& variant) {
        if (canonical == variant) {
            return;
        }
        for (auto it = map_.find(canonical); it != map_.end(); it = map_.find(it->second)) {
            if (it->second == variant) {
                throw FormatError("synonym cycle involving '" + variant + "'");
            }
        }
        map_[variant] = canonical;
    }

    [[nodiscard]] const std::string& canonical(const std::string& token) const {
        const std::string* current = &token;
        for (auto it = map_.find(*current); it != map_.end(); it = map_.find(*current)) {
            current = &it->second;
        }
        return *current;
    }

    [[nodiscard]] bool empty() const noexcept { return map_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return map_.size(); }

private:
    std::unordered_map<std::string, std::string> map_;
};

/// One token per line. Entries are lowercased the same way tokenize() does.
inline StopwordSet load_stopwords(const std::filesystem::path& path) {
    StopwordSet out;
    for (const auto& line : detail::split_lines(detail::read_text_file(path))) {
        const std::string word = detail::trim(line);
        if (!word.empty()) {
            out.insert(detail::ascii_lower(word));
        }
    }
    return out;
}

/// Lines of "canonical<TAB>variant1<TAB>variant2...".
inline SynonymMap load_synonyms(const std::filesystem::path& path) {
    SynonymMap out;
    for (const auto& line : detail::split_lines(detail::read_text_file(path))) {
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (start <= line.size()) {
            const auto tab = line.find('\t', start);
            const auto end = tab == std::string::npos ? line.size() : tab;
            const std::string field = detail::trim(std::string_view(line).substr(start, end - start));
            if (!field.empty()) {
                fields.push_back(detail::ascii_lower(field));
            }
            start = end + 1;
        }
        for (std::size_t i = 1; i < fields.size(); ++i) {
            out.add(fields[0], fields[i]);
        }
    }
    return out;
}

/// Stopword removal, synonym canonicalization, then a second stopword pass.
[[nodiscard]] inline TokenList normalize(const TokenList& tokens, const StopwordSet& stopwords,
                                         const SynonymMap& synonyms) {
    TokenList out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (stopwords.contains(t)) {
            continue;
        }
        const std::string& canon = synonyms.canonical(t);
        if (stopwords.contains(canon)) {
            continue;
        }
        out.push_back(canon);
    }
    return out;
}

// ---------------------------------------------------------------------------
// TF-IDF
// ---------------------------------------------------------------------------

struct SparseEntry {
    std::uint32_t index = 0;
    double weight = 0.0;

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sparse TF-IDF weights sorted by column index; weights are strictly positive.
struct TfIdfVector {
    std::vector<SparseEntry> entries;

    [[nodiscard]] bool empty() const noexcept { return entries.empty(); }
    friend bool operator==(const TfIdfVector&, const TfIdfVector&) = default;
};

/// Vocabulary and inverse document frequencies for one document collection.
/// idf(t) = N / df(t), without a logarithm.
struct TfIdfModel {
    std::vector<std::string> terms;  // column index -> term, lexicographic order
    std::unordered_map<std::string, std::uint32_t> vocabulary;
    std::vector<double> idf;
    std::size_t n_documents = 0;

    [[nodiscard]] std::size_t size() const noexcept { return terms.size(); }

    [[nodiscard]] std::optional<std::uint32_t> column(const std::string& term) const {
        const auto it = vocabulary.find(term);
        if (it == vocabulary.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    /// Rebuilds the lookup from serialized (terms, idf) columns.
    static TfIdfModel from_columns(std::vector<std::string> terms, std::vector<double> idf, std::size_t n_documents) {
        if (terms.size() != idf.size()) {
            throw FormatError("tf-idf model: term and idf columns differ in length");
        }
        TfIdfModel m;
        m.terms = std::move(terms);
        m.idf = std::move(idf);
        m.n_documents = n_documents;
        for (std::size_t i = 0; i < m.terms.size(); ++i) {
            m.vocabulary.emplace(m.terms[i], static_cast<std::uint32_t>(i));
        }
        return m;
    }
};

[[nodiscard]] inline TfIdfModel build_tfidf_model(const std::vector<TokenList>& documents) {
    if (documents.empty()) {
        throw ConfigError("cannot build a tf-idf model from zero documents");
    }
    std::map<std::string, std::size_t> df;
    for (const auto& doc : documents) {
        const std::set<std::string> unique(doc.begin(), doc.end());
        for (const auto& t : unique) {
            ++df[t];
        }
    }
    TfIdfModel m;
    m.n_documents = documents.size();
    m.terms.reserve(df.size());
    m.idf.reserve(df.size());
    for (const auto& [term, count] : df) {
        m.vocabulary.emplace(term, static_cast<std::uint32_t>(m.terms.size()));
        m.terms.push_back(term);
        m.idf.push_back(static_cast<double>(m.n_documents) / static_cast<double>(count));
    }
    return m;
}

/// Raw-count TF times IDF; out-of-vocabulary tokens are ignored.
[[nodiscard]] inline TfIdfVector tfidf_vector(const TokenList& tokens, const TfIdfModel& model) {
    std::map<std::uint32_t, std::size_t> tf;
    for (const auto& t : tokens) {
        if (const auto col = model.column(t)) {
            ++tf[*col];
        }
    }
    TfIdfVector v;
    v.entries.reserve(tf.size());
    for (const auto& [col, count] : tf) {
        v.entries.push_back({col, static_cast<double>(count) * model.idf[col]});
    }
    return v;
}

// ---------------------------------------------------------------------------
// Word embeddings
// ---------------------------------------------------------------------------

/// Word vectors of uniform dimension, in file order.
class EmbeddingTable {
public:
    explicit EmbeddingTable(std::size_t dimension = kDefaultEmbeddingDim) : dimension_(dimension) {}

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t size() const noexcept { return words_.size(); }
    [[nodiscard]] const std::vector<std::string>& words() const noexcept { return words_; }

    /// Inserts or replaces; returns false when the word was already present.
    bool set(const std::string& word, std::vector<double> vec) {
        if (vec.size() != dimension_) {
            throw FormatError("embedding for '" + word + "' has dimension " + std::to_string(vec.size()) +
                              ", expected " + std::to_string(dimension_));
        }
        const auto [it, inserted] = index_.emplace(word, vectors_.size());
        if (inserted) {
            words_.push_back(word);
            vectors_.push_back(std::move(vec));
        } else {
            vectors_[it->second] = std::move(vec);
        }
        return inserted;
    }

    [[nodiscard]] const std::vector<double>* find(const std::string& word) const {
        const auto it = index_.find(word);
        return it == index_.end() ? nullptr : &vectors_[it->second];
    }

    friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
        return a.dimension_ == b.dimension_ && a.words_ == b.words_ && a.vectors_ == b.vectors_;
    }

private:
    std::size_t dimension_;
    std::vector<std::string> words_;
    std::vector<std::vector<double>> vectors_;
    std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

inline bool parse_unsigned(std::string_view s, std::size_t& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_double(std::string_view s, double& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Parses "word v1 ... vd" lines with an optional "word_count d" header.
/// Without a header the dimension is taken from the first entry. Repeated
/// words keep the last vector and produce a warning.
inline EmbeddingTable parse_embeddings(const std::string& text, const std::string& source = "<embeddings>",
                                       std::vector<std::string>* warnings = nullptr) {
    const auto lines = detail::split_lines(text);
    std::size_t first = 0;
    std::size_t dimension = 0;
    while (first < lines.size() && detail::trim(lines[first]).empty()) {
        ++first;
    }
    if (first < lines.size()) {
        const auto fields = detail::split_spaces(lines[first]);
        std::size_t count = 0;
        std::size_t dim = 0;
        if (fields.size() == 2 && detail::parse_unsigned(fields[0], count) && detail::parse_unsigned(fields[1], dim)) {
            if (dim == 0) {
                throw FormatError(source + ":" + std::to_string(first + 1) + ": header dimension is zero");
            }
            dimension = dim;
            ++first;
        }
    }

    std::optional<EmbeddingTable> table;
    if (dimension != 0) {
        table.emplace(dimension);
    }
    for (std::size_t i = first; i < lines.size(); ++i) {
        const auto fields = detail::split_spaces(lines[i]);
        if (fields.empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(i + 1);
        if (fields.size() < 2) {
            throw FormatError(where + ": entry has no vector values");
        }
        if (!table) {
            table.emplace(fields.size() - 1);
        }
        if (fields.size() - 1 != table->dimension()) {
            throw FormatError(where + ": expected " + std::to_string(table->dimension()) + " values, found " +
                              std::to_string(fields.size() - 1));
        }
        std::vector<double> vec(table->dimension());
        for (std::size_t k = 0; k < vec.size(); ++k) {
            if (!detail::parse_double(fields[k + 1], vec[k])) {
                throw FormatError(where + ": non-numeric value '" + std::string(fields[k + 1]) + "'");
            }
        }
        const std::string word(fields[0]);
        if (!table->set(word, std::move(vec))) {
            const std::string msg = where + ": duplicate embedding for '" + word + "', keeping the last one";
            if (warnings) {
                warnings->push_back(msg);
            } else {
                std::cerr << "warning: " << msg << "\n";
            }
        }
    }
    return table ? std::move(*table) : EmbeddingTable(kDefaultEmbeddingDim);
}

inline EmbeddingTable load_embeddings(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr) {
    return parse_embeddings(detail::read_text_file(path), path.string(), warnings);
}

/// Writes the table with a header and round-trip (17 significant digit) values.
inline std::string format_embeddings(const EmbeddingTable& table) {
    std::string out = std::to_string(table.size()) + " " + std::to_string(table.dimension()) + "\n";
    char buf[40];
    for (const auto& word : table.words()) {
        out += word;
        for (double v : *table.find(word)) {
            std::snprintf(buf, sizeof(buf), " %.17g", v);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

inline void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
    detail::write_text_file(path, format_embeddings(table));
}

/// Mean of the in-vocabulary token vectors, each occurrence counted; the
/// zero vector when no token is in the table. Occurrences are accumulated per
/// word and summed in word order, so the result ignores token order exactly.
[[nodiscard]] inline std::vector<double> embed_report(const TokenList& tokens, const EmbeddingTable& table) {
    std::map<const std::vector<double>*, std::size_t> counts;
    std::map<std::string_view, const std::vector<double>*> by_word;
    std::size_t n = 0;
    for (const auto& t : tokens) {
        if (const auto* vec = table.find(t)) {
            by_word.emplace(t, vec);
            ++counts[vec];
            ++n;
        }
    }
    std::vector<double> sum(table.dimension(), 0.0);
    if (n == 0) {
        return sum;
    }
    for (const auto& [word, vec] : by_word) {
        const double c = static_cast<double>(counts[vec]);
        for (std::size_t k = 0; k < sum.size(); ++k) {
            sum[k] += c * (*vec)[k];
        }
    }
    for (double& v : sum) {
        v /= static_cast<double>(n);
    }
    return sum;
}

}  // namespace setu
