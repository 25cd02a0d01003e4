// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "setu/error.hpp"
#include "setu/image_features.hpp"
#include "setu/text_features.hpp"

namespace setu {

/// The four per-report feature vectors.
struct FeatureBundle {
    StructureVector structure;
    ColorVector color;
    TfIdfVector tfidf;
    std::vector<double> embedding;
    bool has_screenshot = false;  // false: descriptors come from the blank default

    friend bool operator==(const FeatureBundle&, const FeatureBundle&) = default;
};

/// Which features take part in scoring. A group with no enabled member is
/// unavailable and scores 0.
struct FeatureMask {
    bool use_structure = true;
    bool use_color = true;
    bool use_tfidf = true;
    bool use_embedding = true;

    [[nodiscard]] bool screenshot_available() const noexcept { return use_structure || use_color; }
    [[nodiscard]] bool textual_available() const noexcept { return use_tfidf || use_embedding; }

    static constexpr FeatureMask full() { return {}; }
    static constexpr FeatureMask no_tfidf() { return {true, true, false, true}; }
    static constexpr FeatureMask no_embedding() { return {true, true, true, false}; }
    static constexpr FeatureMask no_color() { return {true, false, true, true}; }
    static constexpr FeatureMask no_structure() { return {false, true, true, true}; }

    /// Accepts full, notf, noemb, noclr, nostrc (case-insensitive).
    static FeatureMask parse(std::string_view name) {
        std::string n(name);
        std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
        if (n == "full") return full();
        if (n == "notf") return no_tfidf();
        if (n == "noemb") return no_embedding();
        if (n == "noclr") return no_color();
        if (n == "nostrc") return no_structure();
        throw ConfigError("unknown feature mask '" + std::string(name) + "'");
    }

    [[nodiscard]] std::string name() const {
        if (*this == full()) return "full";
        if (*this == no_tfidf()) return "notf";
        if (*this == no_embedding()) return "noemb";
        if (*this == no_color()) return "noclr";
        if (*this == no_structure()) return "nostrc";
        std::string s = "mask:";
        s += use_structure ? 'S' : '-';
        s += use_color ? 'C' : '-';
        s += use_tfidf ? 'T' : '-';
        s += use_embedding ? 'E' : '-';
        return s;
    }

    friend constexpr bool operator==(const FeatureMask&, const FeatureMask&) = default;
};

struct SimilarityScores {
    double s_structure = 0.0;
    double s_color = 0.0;
    double s_tfidf = 0.0;
    double s_embedding = 0.0;
    double s_screenshot = 0.0;
    double s_textual = 0.0;
    double s_total = 0.0;

    friend bool operator==(const SimilarityScores&, const SimilarityScores&) = default;
};

/// a.b / (|a||b|); 0 when either vector has zero norm. Result clamped to [-1, 1].
[[nodiscard]] inline double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ConfigError("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

/// Sparse cosine over index-sorted entries.
[[nodiscard]] inline double cosine(const TfIdfVector& a, const TfIdfVector& b) {
    double na = 0.0;
    double nb = 0.0;
    for (const auto& e : a.entries) {
        na += e.weight * e.weight;
    }
    for (const auto& e : b.entries) {
        nb += e.weight * e.weight;
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    double dot = 0.0;
    auto ia = a.entries.begin();
    auto ib = b.entries.begin();
    while (ia != a.entries.end() && ib != b.entries.end()) {
        if (ia->index < ib->index) {
            ++ia;
        } else if (ib->index < ia->index) {
            ++ib;
        } else {
            dot += ia->weight * ib->weight;
            ++ia;
            ++ib;
        }
    }
    return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

/// Group scores average their enabled members; s_total averages the two groups.
[[nodiscard]] inline SimilarityScores score_pair(const FeatureBundle& a, const FeatureBundle& b,
                                                 const FeatureMask& mask = FeatureMask::full()) {
    SimilarityScores s;
    int screenshot_members = 0;
    int textual_members = 0;
    double screenshot_sum = 0.0;
    double textual_sum = 0.0;

    if (mask.use_structure) {
        s.s_structure = std::clamp(cosine(a.structure.values, b.structure.values), 0.0, 1.0);
        screenshot_sum += s.s_structure;
        ++screenshot_members;
    }
    if (mask.use_color) {
        s.s_color = std::clamp(cosine(a.color.values, b.color.values), 0.0, 1.0);
        screenshot_sum += s.s_color;
        ++screenshot_members;
    }
    if (mask.use_tfidf) {
        s.s_tfidf = std::clamp(cosine(a.tfidf, b.tfidf), 0.0, 1.0);
        textual_sum += s.s_tfidf;
        ++textual_members;
    }
    if (mask.use_embedding) {
        // Embedding cosines can be negative; negative similarity counts as none.
        s.s_embedding = std::clamp(cosine(a.embedding, b.embedding), 0.0, 1.0);
        textual_sum += s.s_embedding;
        ++textual_members;
    }
    s.s_screenshot = screenshot_members > 0 ? screenshot_sum / screenshot_members : 0.0;
    s.s_textual = textual_members > 0 ? textual_sum / textual_members : 0.0;
    s.s_total = (s.s_screenshot + s.s_textual) / 2.0;
    return s;
}

}  // namespace setu
