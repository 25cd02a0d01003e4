// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "setu/corpus.hpp"
#include "setu/detail/parallel.hpp"
#include "setu/error.hpp"
#include "setu/metrics.hpp"
#include "setu/ranker.hpp"

namespace setu {

inline constexpr std::size_t kRecallCutoffs[] = {1, 5, 10};

struct QueryEval {
    std::string query_id;
    int recall_at_1 = 0;
    int recall_at_5 = 0;
    int recall_at_10 = 0;
    double ap = 0.0;
    double rr = 0.0;
};

/// Per-query metrics of one method on one project and their unweighted means.
struct MetricsReport {
    std::string project_id;
    std::string method;
    std::vector<QueryEval> queries;
    double recall_at_1 = 0.0;
    double recall_at_5 = 0.0;
    double recall_at_10 = 0.0;
    double map = 0.0;
    double mrr = 0.0;
};

/// All pairwise similarity scores of a project under one mask.
class ScoreMatrix {
public:
    ScoreMatrix() = default;

    ScoreMatrix(const ProjectFeatures& project, const FeatureMask& mask) : n_(project.size()), data_(n_ * n_) {
        detail::parallel_for(n_, [&](std::size_t i) {
            for (std::size_t j = 0; j < n_; ++j) {
                if (i != j) {
                    data_[i * n_ + j] = score_pair(project.bundles[i], project.bundles[j], mask);
                }
            }
        });
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::span<const SimilarityScores> row(std::size_t i) const {
        return std::span<const SimilarityScores>(data_).subspan(i * n_, n_);
    }

private:
    std::size_t n_ = 0;
    std::vector<SimilarityScores> data_;
};

namespace detail {

/// Ground-truth duplicate indices re-expressed in feature order. Every
/// report must appear on both sides.
inline std::vector<std::vector<std::size_t>> align_ground_truth(const ProjectFeatures& project, const GroundTruth& gt) {
    if (gt.size() != project.size()) {
        throw ValidationError("ground truth for " + gt.project_id + " covers " + std::to_string(gt.size()) +
                              " reports but features cover " + std::to_string(project.size()));
    }
    std::unordered_map<std::string, std::size_t> feature_index;
    for (std::size_t i = 0; i < project.size(); ++i) {
        feature_index.emplace(project.report_ids[i], i);
    }
    std::vector<std::size_t> to_feature(gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i) {
        const auto it = feature_index.find(gt.report_ids[i]);
        if (it == feature_index.end()) {
            throw ValidationError("report " + gt.report_ids[i] + " has no features in project " + project.project_id);
        }
        to_feature[i] = it->second;
    }
    std::vector<std::vector<std::size_t>> aligned(project.size());
    for (std::size_t i = 0; i < gt.size(); ++i) {
        auto& dst = aligned[to_feature[i]];
        for (std::size_t j : gt.duplicates[i]) {
            dst.push_back(to_feature[j]);
        }
    }
    return aligned;
}

inline Relevance relevance_of(const std::vector<RankedIndex>& order, const std::vector<std::size_t>& gt,
                              std::vector<char>& scratch) {
    for (std::size_t j : gt) {
        scratch[j] = 1;
    }
    Relevance rel;
    rel.n_relevant = gt.size();
    rel.hits.reserve(order.size());
    for (const auto& e : order) {
        rel.hits.push_back(scratch[e.index] != 0);
    }
    for (std::size_t j : gt) {
        scratch[j] = 0;
    }
    return rel;
}

}  // namespace detail

/// Evaluates every report with at least one duplicate as a query against the
/// rest of its project, using precomputed scores.
[[nodiscard]] inline MetricsReport evaluate_scores(const ProjectFeatures& project, const ScoreMatrix& scores,
                                                   const GroundTruth& gt, const Combiner& combiner,
                                                   std::string method_label = {}) {
    const auto aligned = detail::align_ground_truth(project, gt);
    std::vector<std::size_t> queries;
    for (std::size_t i = 0; i < project.size(); ++i) {
        if (!aligned[i].empty()) {
            queries.push_back(i);
        }
    }
    if (queries.empty()) {
        throw ValidationError("project " + project.project_id + " has no report with a duplicate to evaluate");
    }

    MetricsReport report;
    report.project_id = project.project_id;
    report.method = method_label.empty() ? combiner.name() : std::move(method_label);
    report.queries.resize(queries.size());
    detail::parallel_for(queries.size(), [&](std::size_t qi) {
        const std::size_t q = queries[qi];
        std::vector<char> scratch(project.size(), 0);
        const auto order = rank_order(q, scores.row(q), combiner);
        const Relevance rel = detail::relevance_of(order, aligned[q], scratch);
        QueryEval& e = report.queries[qi];
        e.query_id = project.report_ids[q];
        e.recall_at_1 = recall_at_k(rel, 1);
        e.recall_at_5 = recall_at_k(rel, 5);
        e.recall_at_10 = recall_at_k(rel, 10);
        e.ap = average_precision(rel);
        e.rr = reciprocal_rank(rel);
    });

    const double n = static_cast<double>(report.queries.size());
    for (const auto& e : report.queries) {
        report.recall_at_1 += e.recall_at_1;
        report.recall_at_5 += e.recall_at_5;
        report.recall_at_10 += e.recall_at_10;
        report.map += e.ap;
        report.mrr += e.rr;
    }
    report.recall_at_1 /= n;
    report.recall_at_5 /= n;
    report.recall_at_10 /= n;
    report.map /= n;
    report.mrr /= n;
    return report;
}

[[nodiscard]] inline MetricsReport evaluate_project(const ProjectFeatures& project, const GroundTruth& gt,
                                                    const Combiner& combiner, const FeatureMask& mask = FeatureMask::full(),
                                                    std::string method_label = {}) {
    validate(combiner, mask);
    return evaluate_scores(project, ScoreMatrix(project, mask), gt, combiner, std::move(method_label));
}

// ---------------------------------------------------------------------------
// Threshold tuning
// ---------------------------------------------------------------------------

/// Supplies ground truth by project id. Tuning code only reaches labels
/// through this interface, so access can be audited.
class LabelSource {
public:
    virtual ~LabelSource() = default;
    [[nodiscard]] virtual GroundTruth ground_truth(const std::string& project_id) const = 0;
};

class CorpusLabels final : public LabelSource {
public:
    explicit CorpusLabels(const Corpus& corpus, std::string unique_label = kDefaultUniqueLabel)
        : corpus_(corpus), unique_label_(std::move(unique_label)) {}

    [[nodiscard]] GroundTruth ground_truth(const std::string& project_id) const override {
        const Project* p = corpus_.find(project_id);
        if (!p) {
            throw ValidationError("no labels for project " + project_id);
        }
        return setu::ground_truth(*p, unique_label_);
    }

private:
    const Corpus& corpus_;
    std::string unique_label_;
};

/// Thresholds 0, step, 2*step, ..., 1.
[[nodiscard]] inline std::vector<double> threshold_grid(double step = 0.01) {
    if (!(step > 0.0 && step <= 1.0)) {
        throw ConfigError("grid step must lie in (0, 1]");
    }
    std::vector<double> grid;
    const double steps = std::round(1.0 / step);
    if (std::abs(steps * step - 1.0) < 1e-9) {
        const auto n = static_cast<std::size_t>(steps);
        for (std::size_t i = 0; i <= n; ++i) {
            grid.push_back(static_cast<double>(i) / static_cast<double>(n));
        }
    } else {
        for (std::size_t i = 0; static_cast<double>(i) * step <= 1.0 + 1e-12; ++i) {
            grid.push_back(std::min(1.0, static_cast<double>(i) * step));
        }
    }
    return grid;
}

struct GridPoint {
    double thres = 0.0;
    double mean_map = 0.0;
};

struct TuningResult {
    std::string holdout_id;
    double thres = 0.0;
    double training_map = 0.0;
    std::vector<GridPoint> grid;
};

/// MAP of the hierarchical ranker at each threshold of `grid`.
[[nodiscard]] inline std::vector<double> map_curve(const ProjectFeatures& project, const GroundTruth& gt,
                                                   const FeatureMask& mask, std::span<const double> grid) {
    validate(Combiner::hierarchical(0.0), mask);
    const ScoreMatrix scores(project, mask);
    std::vector<double> curve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        curve[g] = evaluate_scores(project, scores, gt, Combiner::hierarchical(grid[g])).map;
    }
    return curve;
}

/// Picks the threshold maximizing mean training MAP; ties go to the smallest.
[[nodiscard]] inline TuningResult tune_threshold(std::span<const ProjectFeatures* const> training,
                                                 const LabelSource& labels, const FeatureMask& mask,
                                                 std::span<const double> grid) {
    if (training.empty()) {
        throw ConfigError("threshold tuning needs at least one training project");
    }
    if (grid.empty()) {
        throw ConfigError("threshold grid is empty");
    }
    std::vector<double> sum(grid.size(), 0.0);
    for (const ProjectFeatures* project : training) {
        const auto curve = map_curve(*project, labels.ground_truth(project->project_id), mask, grid);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            sum[g] += curve[g];
        }
    }
    TuningResult result;
    std::size_t best = 0;
    const double n = static_cast<double>(training.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double mean = sum[g] / n;
        result.grid.push_back({grid[g], mean});
        if (mean > result.grid[best].mean_map) {
            best = g;
        }
    }
    result.thres = result.grid[best].thres;
    result.training_map = result.grid[best].mean_map;
    return result;
}

struct LeaveOneOutResult {
    TuningResult tuning;
    MetricsReport holdout;
};

/// Tunes on every project except `holdout_id`, then evaluates the held-out
/// project at the tuned threshold. Held-out labels are requested only after
/// tuning has finished.
[[nodiscard]] inline LeaveOneOutResult leave_one_out(std::span<const ProjectFeatures> projects,
                                                     const std::string& holdout_id, const LabelSource& labels,
                                                     const FeatureMask& mask, std::span<const double> grid) {
    const ProjectFeatures* holdout = nullptr;
    std::vector<const ProjectFeatures*> training;
    for (const auto& p : projects) {
        if (p.project_id == holdout_id) {
            holdout = &p;
        } else {
            training.push_back(&p);
        }
    }
    if (!holdout) {
        throw ConfigError("held-out project '" + holdout_id + "' not found");
    }
    if (training.empty()) {
        throw ConfigError("leave-one-out tuning needs at least two projects");
    }
    LeaveOneOutResult out;
    out.tuning = tune_threshold(training, labels, mask, grid);
    out.tuning.holdout_id = holdout_id;
    out.holdout = evaluate_project(*holdout, labels.ground_truth(holdout_id), Combiner::hierarchical(out.tuning.thres),
                                   mask, "setu");
    return out;
}

}  // namespace setu
