// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "setu/error.hpp"
#include "setu/similarity.hpp"

namespace setu {

/// How screenshot and textual similarity are combined into a ranking.
struct Combiner {
    enum class Kind {
        hierarchical,  // screenshot filter, then textual order (SETU)
        add,           // s_screenshot + s_textual
        multiply,      // s_screenshot * s_textual
        text_first,    // textual filter, then screenshot order
        only_text,
        only_image,
    };

    Kind kind = Kind::hierarchical;
    double thres = 0.0;  // used by hierarchical and text_first only

    static Combiner hierarchical(double thres) { return checked({Kind::hierarchical, thres}); }
    static Combiner text_first(double thres) { return checked({Kind::text_first, thres}); }
    static constexpr Combiner add() { return {Kind::add, 0.0}; }
    static constexpr Combiner multiply() { return {Kind::multiply, 0.0}; }
    static constexpr Combiner only_text() { return {Kind::only_text, 0.0}; }
    static constexpr Combiner only_image() { return {Kind::only_image, 0.0}; }

    [[nodiscard]] bool has_threshold() const noexcept {
        return kind == Kind::hierarchical || kind == Kind::text_first;
    }
    [[nodiscard]] bool needs_screenshot() const noexcept { return kind != Kind::only_text; }
    [[nodiscard]] bool needs_textual() const noexcept { return kind != Kind::only_image; }

    /// setu | addcmb | multiplycmb | textfirst | onlytext | onlyimage
    static Combiner parse(std::string_view name, double thres) {
        std::string n(name);
        std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
        if (n == "setu" || n == "hierarchical") return hierarchical(thres);
        if (n == "addcmb") return add();
        if (n == "multiplycmb") return multiply();
        if (n == "textfirst") return text_first(thres);
        if (n == "onlytext") return only_text();
        if (n == "onlyimage") return only_image();
        throw ConfigError("unknown combiner '" + std::string(name) + "'");
    }

    [[nodiscard]] std::string name() const {
        switch (kind) {
            case Kind::hierarchical: return "setu";
            case Kind::add: return "addcmb";
            case Kind::multiply: return "multiplycmb";
            case Kind::text_first: return "textfirst";
            case Kind::only_text: return "onlytext";
            case Kind::only_image: return "onlyimage";
        }
        return "unknown";
    }

    friend bool operator==(const Combiner&, const Combiner&) = default;

private:
    static Combiner checked(Combiner c) {
        if (!(c.thres >= 0.0 && c.thres <= 1.0)) {
            throw ConfigError("threshold must lie in [0, 1], got " + std::to_string(c.thres));
        }
        return c;
    }
};

enum class ClassTag { first, second, unclassed };

[[nodiscard]] inline const char* to_string(ClassTag tag) noexcept {
    switch (tag) {
        case ClassTag::first: return "first";
        case ClassTag::second: return "second";
        case ClassTag::unclassed: return "unclassed";
    }
    return "unclassed";
}

struct RankedEntry {
    std::string report_id;
    std::size_t index = 0;  // canonical (ingestion) position within the project
    ClassTag class_tag = ClassTag::unclassed;
    SimilarityScores scores;
    std::size_t rank = 0;  // 1-based
};

struct QueryResult {
    std::string query_id;
    std::vector<RankedEntry> entries;
};

/// Feature bundles of one project in canonical order.
struct ProjectFeatures {
    std::string project_id;
    std::vector<std::string> report_ids;
    std::vector<FeatureBundle> bundles;

    [[nodiscard]] std::size_t size() const noexcept { return report_ids.size(); }

    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view report_id) const {
        for (std::size_t i = 0; i < report_ids.size(); ++i) {
            if (report_ids[i] == report_id) {
                return i;
            }
        }
        return std::nullopt;
    }
};

inline void validate(const Combiner& combiner, const FeatureMask& mask) {
    if (combiner.needs_screenshot() && !mask.screenshot_available()) {
        throw ConfigError("combiner '" + combiner.name() + "' needs screenshot similarity but mask '" +
                          mask.name() + "' disables every screenshot feature");
    }
    if (combiner.needs_textual() && !mask.textual_available()) {
        throw ConfigError("combiner '" + combiner.name() + "' needs textual similarity but mask '" +
                          mask.name() + "' disables every textual feature");
    }
    if (combiner.has_threshold() && !(combiner.thres >= 0.0 && combiner.thres <= 1.0)) {
        throw ConfigError("threshold must lie in [0, 1]");
    }
}

struct RankedIndex {
    std::size_t index;
    ClassTag class_tag;
};

/// Orders every candidate except `query` given its similarity row
/// (row[j] = scores between the query and report j). Ties fall back to
/// canonical order.
[[nodiscard]] inline std::vector<RankedIndex> rank_order(std::size_t query, std::span<const SimilarityScores> row,
                                                         const Combiner& combiner) {
    struct Keyed {
        std::size_t index;
        ClassTag tag;
        double key;
    };
    std::vector<Keyed> items;
    items.reserve(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (j == query) {
            continue;
        }
        const SimilarityScores& s = row[j];
        Keyed k{j, ClassTag::unclassed, 0.0};
        switch (combiner.kind) {
            case Combiner::Kind::hierarchical:
                if (s.s_screenshot > combiner.thres) {
                    k.tag = ClassTag::first;
                    k.key = s.s_textual;
                } else {
                    k.tag = ClassTag::second;
                    k.key = s.s_total;
                }
                break;
            case Combiner::Kind::text_first:
                if (s.s_textual > combiner.thres) {
                    k.tag = ClassTag::first;
                    k.key = s.s_screenshot;
                } else {
                    k.tag = ClassTag::second;
                    k.key = s.s_total;
                }
                break;
            case Combiner::Kind::add: k.key = s.s_screenshot + s.s_textual; break;
            case Combiner::Kind::multiply: k.key = s.s_screenshot * s.s_textual; break;
            case Combiner::Kind::only_text: k.key = s.s_textual; break;
            case Combiner::Kind::only_image: k.key = s.s_screenshot; break;
        }
        items.push_back(k);
    }
    // First class precedes second; single-list combiners only produce unclassed.
    const auto class_rank = [](ClassTag t) { return t == ClassTag::second ? 1 : 0; };
    std::sort(items.begin(), items.end(), [&](const Keyed& a, const Keyed& b) {
        if (class_rank(a.tag) != class_rank(b.tag)) {
            return class_rank(a.tag) < class_rank(b.tag);
        }
        if (a.key != b.key) {
            return a.key > b.key;
        }
        return a.index < b.index;
    });
    std::vector<RankedIndex> out;
    out.reserve(items.size());
    for (const auto& k : items) {
        out.push_back({k.index, k.tag});
    }
    return out;
}

[[nodiscard]] inline std::vector<SimilarityScores> similarity_row(const ProjectFeatures& project, std::size_t query,
                                                                  const FeatureMask& mask) {
    std::vector<SimilarityScores> row(project.size());
    for (std::size_t j = 0; j < project.size(); ++j) {
        if (j != query) {
            row[j] = score_pair(project.bundles[query], project.bundles[j], mask);
        }
    }
    return row;
}

[[nodiscard]] inline QueryResult make_query_result(const ProjectFeatures& project, std::size_t query,
                                                   std::span<const SimilarityScores> row,
                                                   const std::vector<RankedIndex>& order) {
    QueryResult result;
    result.query_id = project.report_ids.at(query);
    result.entries.reserve(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        const std::size_t j = order[r].index;
        result.entries.push_back({project.report_ids[j], j, order[r].class_tag, row[j], r + 1});
    }
    return result;
}

/// Ranks every other report of the query's project as a duplicate candidate.
[[nodiscard]] inline QueryResult rank_duplicates(std::string_view query_id, const ProjectFeatures& project,
                                                 const Combiner& combiner,
                                                 const FeatureMask& mask = FeatureMask::full()) {
    validate(combiner, mask);
    const auto query = project.index_of(query_id);
    if (!query) {
        throw ConfigError("query report '" + std::string(query_id) + "' is not in project " + project.project_id);
    }
    const auto row = similarity_row(project, *query, mask);
    return make_query_result(project, *query, row, rank_order(*query, row, combiner));
}

}  // namespace setu
