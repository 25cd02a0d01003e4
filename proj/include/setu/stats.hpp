// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "setu/error.hpp"

namespace setu {

// ---------------------------------------------------------------------------
// Mann-Whitney U, one-tailed
// ---------------------------------------------------------------------------

/// Combined sample size at or below which the exact distribution is used.
inline constexpr std::size_t kExactMannWhitneyLimit = 12;

enum class MannWhitneyMethod { automatic, exact, normal };

struct MannWhitneyResult {
    double u = 0.0;        // #{x > y} + 0.5 #{x == y}
    double p_value = 1.0;  // P(U >= u) under H0
    bool exact = false;
};

namespace detail {

/// Pooled sample with doubled midranks (integers even under ties).
struct RankedPool {
    std::vector<std::int64_t> doubled_rank;  // per original position: xs first, then ys
    std::vector<std::size_t> tie_sizes;      // size of each group of equal values, ascending value order
};

inline RankedPool rank_pool(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size() + ys.size();
    std::vector<double> values;
    values.reserve(n);
    values.insert(values.end(), xs.begin(), xs.end());
    values.insert(values.end(), ys.begin(), ys.end());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    RankedPool pool;
    pool.doubled_rank.resize(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const std::size_t t = j - i + 1;
        // positions i..j hold ranks i+1..j+1; doubled midrank = (i+1) + (j+1)
        const auto doubled = static_cast<std::int64_t>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) {
            pool.doubled_rank[order[k]] = doubled;
        }
        pool.tie_sizes.push_back(t);
        i = j + 1;
    }
    return pool;
}

inline void require_nonempty(std::span<const double> xs, std::span<const double> ys, const char* what) {
    if (xs.empty() || ys.empty()) {
        throw ConfigError(std::string(what) + ": both samples must be non-empty");
    }
}

inline double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return std::round(r);
}

}  // namespace detail

/// U statistic of xs against ys, counting ties as one half.
[[nodiscard]] inline double mann_whitney_u(std::span<const double> xs, std::span<const double> ys) {
    detail::require_nonempty(xs, ys, "mann_whitney_u");
    const auto pool = detail::rank_pool(xs, ys);
    std::int64_t doubled_sum = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        doubled_sum += pool.doubled_rank[i];
    }
    const double nx = static_cast<double>(xs.size());
    return static_cast<double>(doubled_sum) / 2.0 - nx * (nx + 1.0) / 2.0;
}

/// Exact one-tailed p-value, conditional on the observed tie pattern. The
/// null distribution of the (doubled) rank sum is built by dynamic
/// programming over tie groups.
[[nodiscard]] inline MannWhitneyResult mann_whitney_exact(std::span<const double> xs, std::span<const double> ys) {
    detail::require_nonempty(xs, ys, "mann_whitney_exact");
    const std::size_t nx = xs.size();
    const std::size_t n = nx + ys.size();
    if (n > 64) {
        throw ConfigError("exact Mann-Whitney distribution limited to 64 observations");
    }
    const auto pool = detail::rank_pool(xs, ys);
    std::int64_t observed = 0;
    for (std::size_t i = 0; i < nx; ++i) {
        observed += pool.doubled_rank[i];
    }

    const std::size_t max_sum = n * (n + 1);  // doubled rank sum of the full pool
    // ways[k][s]: number of x-assignments picking k members with doubled rank sum s
    std::vector<std::vector<double>> ways(nx + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    std::size_t start = 0;  // 0-based position of the current tie group
    for (const std::size_t t : pool.tie_sizes) {
        const std::size_t doubled = 2 * start + t + 1;
        auto next = std::vector<std::vector<double>>(nx + 1, std::vector<double>(max_sum + 1, 0.0));
        for (std::size_t k = 0; k <= nx; ++k) {
            for (std::size_t s = 0; s <= max_sum; ++s) {
                const double w = ways[k][s];
                if (w == 0.0) {
                    continue;
                }
                for (std::size_t j = 0; j <= t && k + j <= nx; ++j) {
                    const std::size_t s2 = s + j * doubled;
                    if (s2 <= max_sum) {
                        next[k + j][s2] += w * detail::binomial(t, j);
                    }
                }
            }
        }
        ways = std::move(next);
        start += t;
    }

    double tail = 0.0;
    for (std::size_t s = static_cast<std::size_t>(observed); s <= max_sum; ++s) {
        tail += ways[nx][s];
    }
    MannWhitneyResult r;
    r.u = static_cast<double>(observed) / 2.0 - static_cast<double>(nx) * (static_cast<double>(nx) + 1.0) / 2.0;
    r.p_value = std::clamp(tail / detail::binomial(n, nx), std::numeric_limits<double>::min(), 1.0);
    r.exact = true;
    return r;
}

/// Normal approximation with tie and continuity corrections.
[[nodiscard]] inline MannWhitneyResult mann_whitney_normal(std::span<const double> xs, std::span<const double> ys) {
    detail::require_nonempty(xs, ys, "mann_whitney_normal");
    const double nx = static_cast<double>(xs.size());
    const double ny = static_cast<double>(ys.size());
    const double n = nx + ny;
    const auto pool = detail::rank_pool(xs, ys);

    double tie_term = 0.0;
    for (const std::size_t t : pool.tie_sizes) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    MannWhitneyResult r;
    r.u = mann_whitney_u(xs, ys);
    r.exact = false;
    const double variance = nx * ny / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(variance > 0.0)) {
        r.p_value = 1.0;
        return r;
    }
    const double z = (r.u - nx * ny / 2.0 - 0.5) / std::sqrt(variance);
    r.p_value = std::clamp(0.5 * std::erfc(z / std::sqrt(2.0)), std::numeric_limits<double>::min(), 1.0);
    return r;
}

/// Tests H1: ys is stochastically smaller than xs.
[[nodiscard]] inline MannWhitneyResult mann_whitney_one_tailed(std::span<const double> xs, std::span<const double> ys,
                                                               MannWhitneyMethod method = MannWhitneyMethod::automatic) {
    switch (method) {
        case MannWhitneyMethod::exact: return mann_whitney_exact(xs, ys);
        case MannWhitneyMethod::normal: return mann_whitney_normal(xs, ys);
        case MannWhitneyMethod::automatic: break;
    }
    detail::require_nonempty(xs, ys, "mann_whitney_one_tailed");
    if (xs.size() + ys.size() <= kExactMannWhitneyLimit) {
        return mann_whitney_exact(xs, ys);
    }
    return mann_whitney_normal(xs, ys);
}

/// p * m, capped at 1.
[[nodiscard]] inline std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m) {
    if (m < p_values.size()) {
        throw ConfigError("bonferroni: test count smaller than number of p-values");
    }
    std::vector<double> out;
    out.reserve(p_values.size());
    for (double p : p_values) {
        out.push_back(std::min(1.0, p * static_cast<double>(m)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cliff's delta
// ---------------------------------------------------------------------------

enum class EffectSize { negligible, small, medium, large };

[[nodiscard]] inline const char* to_string(EffectSize e) noexcept {
    switch (e) {
        case EffectSize::negligible: return "negligible";
        case EffectSize::small: return "small";
        case EffectSize::medium: return "medium";
        case EffectSize::large: return "large";
    }
    return "negligible";
}

inline constexpr double kCliffSmall = 0.147;
inline constexpr double kCliffMedium = 0.33;
inline constexpr double kCliffLarge = 0.474;

[[nodiscard]] inline EffectSize interpret_cliffs_delta(double delta) noexcept {
    const double a = std::abs(delta);
    if (a < kCliffSmall) return EffectSize::negligible;
    if (a < kCliffMedium) return EffectSize::small;
    if (a < kCliffLarge) return EffectSize::medium;
    return EffectSize::large;
}

struct CliffsDelta {
    double delta = 0.0;
    EffectSize interpretation = EffectSize::negligible;
};

/// (#{x > y} - #{x < y}) / (nx * ny), counted with a sort and binary search.
[[nodiscard]] inline CliffsDelta cliffs_delta(std::span<const double> xs, std::span<const double> ys) {
    detail::require_nonempty(xs, ys, "cliffs_delta");
    std::vector<double> sorted(ys.begin(), ys.end());
    std::sort(sorted.begin(), sorted.end());
    std::int64_t greater = 0;
    std::int64_t less = 0;
    for (double x : xs) {
        const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
        const auto hi = std::upper_bound(sorted.begin(), sorted.end(), x);
        greater += lo - sorted.begin();
        less += sorted.end() - hi;
    }
    CliffsDelta out;
    out.delta = static_cast<double>(greater - less) /
                (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
    out.interpretation = interpret_cliffs_delta(out.delta);
    return out;
}

struct StatTestResult {
    double u_statistic = 0.0;
    double p_value = 1.0;
    double p_adjusted = 1.0;
    double cliffs_delta = 0.0;
    EffectSize interpretation = EffectSize::negligible;
};

}  // namespace setu
