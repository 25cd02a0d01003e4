// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "setu/error.hpp"
#include "setu/ranker.hpp"

namespace setu {

/// Ranked relevance judgements of one query: hits[r] is true when the entry
/// at rank r + 1 is a ground-truth duplicate.
struct Relevance {
    std::vector<bool> hits;
    std::size_t n_relevant = 0;  // |G(q)|
};

[[nodiscard]] inline Relevance relevance(const QueryResult& result, const std::set<std::string>& gt) {
    Relevance rel;
    rel.n_relevant = gt.size();
    rel.hits.reserve(result.entries.size());
    for (const auto& e : result.entries) {
        rel.hits.push_back(gt.contains(e.report_id));
    }
    return rel;
}

namespace detail {

inline void require_relevant(const Relevance& rel) {
    if (rel.n_relevant == 0) {
        throw ConfigError("query has no ground-truth duplicates; metric undefined");
    }
}

}  // namespace detail

/// 1 when at least one duplicate appears in the top k.
[[nodiscard]] inline int recall_at_k(const Relevance& rel, std::size_t k) {
    detail::require_relevant(rel);
    if (k == 0) {
        throw ConfigError("recall@k needs k >= 1");
    }
    const std::size_t limit = std::min(k, rel.hits.size());
    for (std::size_t r = 0; r < limit; ++r) {
        if (rel.hits[r]) {
            return 1;
        }
    }
    return 0;
}

/// Mean over ground-truth duplicates of precision at the rank where each is
/// retrieved; duplicates never retrieved contribute 0.
[[nodiscard]] inline double average_precision(const Relevance& rel) {
    detail::require_relevant(rel);
    double sum = 0.0;
    std::size_t found = 0;
    for (std::size_t r = 0; r < rel.hits.size(); ++r) {
        if (rel.hits[r]) {
            ++found;
            sum += static_cast<double>(found) / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(rel.n_relevant);
}

/// 1 / rank of the first duplicate, 0 when none is retrieved.
[[nodiscard]] inline double reciprocal_rank(const Relevance& rel) {
    detail::require_relevant(rel);
    for (std::size_t r = 0; r < rel.hits.size(); ++r) {
        if (rel.hits[r]) {
            return 1.0 / static_cast<double>(r + 1);
        }
    }
    return 0.0;
}

[[nodiscard]] inline int recall_at_k(const QueryResult& result, const std::set<std::string>& gt, std::size_t k) {
    return recall_at_k(relevance(result, gt), k);
}

[[nodiscard]] inline double average_precision(const QueryResult& result, const std::set<std::string>& gt) {
    return average_precision(relevance(result, gt));
}

[[nodiscard]] inline double reciprocal_rank(const QueryResult& result, const std::set<std::string>& gt) {
    return reciprocal_rank(relevance(result, gt));
}

/// Relative improvement (ours - baseline) / baseline.
[[nodiscard]] inline double improvement(double ours, double baseline) {
    if (!(baseline > 0.0)) {
        throw ConfigError("improvement needs a positive baseline value");
    }
    return (ours - baseline) / baseline;
}

}  // namespace setu
