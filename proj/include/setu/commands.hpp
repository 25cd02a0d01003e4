// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "setu/corpus.hpp"
#include "setu/detail/io.hpp"
#include "setu/error.hpp"
#include "setu/evaluation.hpp"
#include "setu/feature_store.hpp"
#include "setu/metrics.hpp"
#include "setu/pipeline.hpp"
#include "setu/ranker.hpp"
#include "setu/similarity.hpp"
#include "setu/stats.hpp"
#include "setu/synthgen.hpp"

namespace setu::commands {

using json = nlohmann::ordered_json;

inline constexpr double kDefaultThres = 0.94;

/// JSON number rounded to nine significant digits.
[[nodiscard]] inline json num(double v) { return json(detail::round_sig9(v)); }

// ---------------------------------------------------------------------------
// featurize
// ---------------------------------------------------------------------------

struct FeaturizeOptions {
    std::filesystem::path corpus;
    ResourcePaths resources;
    std::filesystem::path out;
};

inline FeatureStore cmd_featurize(const FeaturizeOptions& opt, std::ostream& log) {
    std::vector<std::string> warnings;
    const TextResources res = load_resources(opt.resources, &warnings);
    for (const auto& w : warnings) {
        log << "warning: " << w << '\n';
    }
    const Corpus corpus = load_corpus(opt.corpus);
    FeatureStore store = featurize_corpus(corpus, res);
    save_feature_store(store, opt.out);
    std::size_t reports = 0;
    for (const auto& p : store.projects) {
        reports += p.features.size();
    }
    log << "featurized " << reports << " reports in " << store.projects.size() << " projects -> " << opt.out.string()
        << '\n';
    return store;
}

// ---------------------------------------------------------------------------
// query
// ---------------------------------------------------------------------------

struct QueryOptions {
    std::filesystem::path store;
    std::string report;
    std::string combiner = "setu";
    double thres = kDefaultThres;
    std::string mask = "full";
    std::size_t top_k = 10;
    std::optional<std::size_t> embedding_dim;
};

[[nodiscard]] inline json query_result_json(const QueryResult& result, const std::string& project_id,
                                            const Combiner& combiner, const FeatureMask& mask, std::size_t top_k) {
    json out;
    out["query_id"] = result.query_id;
    out["project_id"] = project_id;
    out["combiner"] = combiner.name();
    if (combiner.has_threshold()) {
        out["thres"] = num(combiner.thres);
    }
    out["mask"] = mask.name();
    out["results"] = json::array();
    const std::size_t n = std::min(top_k, result.entries.size());
    for (std::size_t i = 0; i < n; ++i) {
        const RankedEntry& e = result.entries[i];
        out["results"].push_back({{"rank", e.rank},
                                  {"report_id", e.report_id},
                                  {"class", to_string(e.class_tag)},
                                  {"s_total", num(e.scores.s_total)},
                                  {"s_screenshot", num(e.scores.s_screenshot)},
                                  {"s_textual", num(e.scores.s_textual)},
                                  {"s_structure", num(e.scores.s_structure)},
                                  {"s_color", num(e.scores.s_color)},
                                  {"s_tfidf", num(e.scores.s_tfidf)},
                                  {"s_embedding", num(e.scores.s_embedding)}});
    }
    return out;
}

inline json cmd_query(const QueryOptions& opt, std::ostream& out) {
    const FeatureStore store = load_feature_store(opt.store, {opt.embedding_dim});
    const StoredProject* project = store.find_report(opt.report);
    if (!project) {
        throw ConfigError("report '" + opt.report + "' is not in the store");
    }
    const Combiner combiner = Combiner::parse(opt.combiner, opt.thres);
    const FeatureMask mask = FeatureMask::parse(opt.mask);
    const QueryResult result = rank_duplicates(opt.report, project->features, combiner, mask);
    json j = query_result_json(result, project->features.project_id, combiner, mask, opt.top_k);
    out << j.dump(2) << '\n';
    return j;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

/// A method: `<combiner>[:<mask>][@<thres>]`, or a bare mask name meaning
/// SETU with that ablation.
struct MethodSpec {
    std::string label;
    Combiner combiner;
    FeatureMask mask;
};

[[nodiscard]] inline MethodSpec parse_method(std::string_view text, double default_thres = kDefaultThres) {
    std::string s(text);
    if (s.empty()) {
        throw ConfigError("empty method name");
    }
    double thres = default_thres;
    if (const auto at = s.find('@'); at != std::string::npos) {
        const std::string value = s.substr(at + 1);
        if (!detail::parse_double(value, thres)) {
            throw ConfigError("bad threshold in method '" + std::string(text) + "'");
        }
        s.resize(at);
    }
    std::string combiner_name = s;
    std::string mask_name = "full";
    if (const auto colon = s.find(':'); colon != std::string::npos) {
        combiner_name = s.substr(0, colon);
        mask_name = s.substr(colon + 1);
    } else {
        static const std::set<std::string> masks = {"notf", "noemb", "noclr", "nostrc"};
        std::string lower = detail::ascii_lower(s);
        if (masks.contains(lower)) {
            combiner_name = "setu";
            mask_name = lower;
        }
    }
    MethodSpec m{std::string(text), Combiner::parse(combiner_name, thres), FeatureMask::parse(mask_name)};
    validate(m.combiner, m.mask);
    return m;
}

[[nodiscard]] inline std::vector<MethodSpec> parse_methods(std::string_view list, double default_thres = kDefaultThres) {
    std::vector<MethodSpec> out;
    std::set<std::string> seen;
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto comma = list.find(',', start);
        const auto end = comma == std::string_view::npos ? list.size() : comma;
        const std::string item = detail::trim(list.substr(start, end - start));
        if (!item.empty()) {
            if (!seen.insert(item).second) {
                throw ConfigError("method '" + item + "' listed twice");
            }
            out.push_back(parse_method(item, default_thres));
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    if (out.empty()) {
        throw ConfigError("no methods given");
    }
    return out;
}

inline constexpr const char* kMetricNames[] = {"recall@1", "recall@5", "recall@10", "MAP", "MRR"};
inline constexpr const char* kQueryMetricNames[] = {"recall@1", "recall@5", "recall@10", "AP", "RR"};

[[nodiscard]] inline std::array<double, 5> metric_values(const MetricsReport& r) {
    return {r.recall_at_1, r.recall_at_5, r.recall_at_10, r.map, r.mrr};
}

[[nodiscard]] inline std::array<double, 5> query_values(const QueryEval& q) {
    return {static_cast<double>(q.recall_at_1), static_cast<double>(q.recall_at_5),
            static_cast<double>(q.recall_at_10), q.ap, q.rr};
}

/// File-name-safe form of a method label.
[[nodiscard]] inline std::string file_stem(const std::string& label) {
    std::string out;
    for (const char c : label) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                          c == '_' || c == '.';
        out += keep ? c : (c == '@' ? '_' : '-');
    }
    return out;
}

struct EvaluateOptions {
    std::filesystem::path store;
    std::filesystem::path corpus;
    std::string methods = "setu,onlytext,onlyimage";
    std::filesystem::path out;
    std::string reference;  // empty: the first method
    std::string unique_label = kDefaultUniqueLabel;
};

struct EvaluateOutput {
    std::vector<MetricsReport> reports;  // method-major, projects in store order
    std::filesystem::path metrics_csv;
    std::filesystem::path metrics_json;
    std::vector<std::filesystem::path> per_query;
};

/// Writes metrics.csv, metrics.json and per_query/<method>.json under `out`.
inline EvaluateOutput cmd_evaluate(const EvaluateOptions& opt, std::ostream& log) {
    const FeatureStore store = load_feature_store(opt.store);
    LoadOptions load;
    load.check_images = false;
    const Corpus corpus = load_corpus(opt.corpus, load);
    const std::vector<MethodSpec> methods = parse_methods(opt.methods);
    const std::string reference = opt.reference.empty() ? methods.front().label : opt.reference;
    if (std::none_of(methods.begin(), methods.end(), [&](const MethodSpec& m) { return m.label == reference; })) {
        throw ConfigError("reference method '" + reference + "' is not among the evaluated methods");
    }

    std::vector<GroundTruth> truths;
    for (const auto& p : store.projects) {
        const Project* proj = corpus.find(p.features.project_id);
        if (!proj) {
            throw ValidationError("project " + p.features.project_id + " is in the store but not in the corpus");
        }
        truths.push_back(ground_truth(*proj, opt.unique_label));
    }

    EvaluateOutput result;
    // One score matrix per (project, mask), shared across combiners.
    std::map<std::pair<std::size_t, std::string>, ScoreMatrix> matrices;
    for (const auto& m : methods) {
        for (std::size_t p = 0; p < store.projects.size(); ++p) {
            const auto key = std::make_pair(p, m.mask.name());
            auto it = matrices.find(key);
            if (it == matrices.end()) {
                it = matrices.emplace(key, ScoreMatrix(store.projects[p].features, m.mask)).first;
            }
            result.reports.push_back(
                evaluate_scores(store.projects[p].features, it->second, truths[p], m.combiner, m.label));
        }
    }

    const std::size_t n_projects = store.projects.size();
    const auto reference_row = [&](std::size_t project) -> const MetricsReport& {
        for (std::size_t m = 0; m < methods.size(); ++m) {
            if (methods[m].label == reference) {
                return result.reports[m * n_projects + project];
            }
        }
        throw ConfigError("reference method missing");
    };

    std::string csv = "project,method";
    for (const char* name : kMetricNames) {
        csv += std::string(",") + name;
    }
    for (const char* name : kMetricNames) {
        csv += std::string(",improvement_") + name;
    }
    csv += '\n';
    json rows = json::array();
    for (std::size_t m = 0; m < methods.size(); ++m) {
        for (std::size_t p = 0; p < n_projects; ++p) {
            const MetricsReport& r = result.reports[m * n_projects + p];
            const auto values = metric_values(r);
            const auto base = metric_values(reference_row(p));
            json row;
            row["project"] = r.project_id;
            row["method"] = r.method;
            row["queries"] = r.queries.size();
            csv += r.project_id + "," + r.method;
            for (std::size_t k = 0; k < values.size(); ++k) {
                row[kMetricNames[k]] = num(values[k]);
                csv += "," + detail::format_sig9(values[k]);
            }
            json imp;
            for (std::size_t k = 0; k < values.size(); ++k) {
                if (base[k] > 0.0) {
                    const double v = improvement(values[k], base[k]);
                    imp[kMetricNames[k]] = num(v);
                    csv += "," + detail::format_sig9(v);
                } else {
                    imp[kMetricNames[k]] = nullptr;
                    csv += ",";
                }
            }
            row["improvement"] = std::move(imp);
            rows.push_back(std::move(row));
            csv += '\n';
        }
    }
    json doc;
    doc["reference"] = reference;
    doc["rows"] = std::move(rows);

    result.metrics_csv = opt.out / "metrics.csv";
    result.metrics_json = opt.out / "metrics.json";
    detail::write_text_file(result.metrics_csv, csv);
    detail::write_text_file(result.metrics_json, doc.dump(2) + "\n");

    for (std::size_t m = 0; m < methods.size(); ++m) {
        json dump;
        dump["method"] = methods[m].label;
        dump["projects"] = json::object();
        for (std::size_t p = 0; p < n_projects; ++p) {
            const MetricsReport& r = result.reports[m * n_projects + p];
            json qs = json::array();
            for (const auto& q : r.queries) {
                json jq;
                jq["query_id"] = q.query_id;
                const auto v = query_values(q);
                for (std::size_t k = 0; k < v.size(); ++k) {
                    jq[kQueryMetricNames[k]] = num(v[k]);
                }
                qs.push_back(std::move(jq));
            }
            dump["projects"][r.project_id] = std::move(qs);
        }
        const auto path = opt.out / "per_query" / (file_stem(methods[m].label) + ".json");
        detail::write_text_file(path, dump.dump(2) + "\n");
        result.per_query.push_back(path);
    }
    log << "evaluated " << methods.size() << " methods on " << n_projects << " projects -> " << opt.out.string()
        << '\n';
    return result;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

/// Per-query values of one method, keyed by project then metric.
struct PerQueryDump {
    std::string method;
    std::map<std::string, std::vector<std::string>> query_ids;
    std::map<std::string, std::array<std::vector<double>, 5>> values;
};

[[nodiscard]] inline PerQueryDump parse_per_query_dump(const std::string& text, const std::string& source) {
    PerQueryDump d;
    try {
        const auto j = nlohmann::json::parse(text);
        d.method = j.at("method").get<std::string>();
        for (const auto& [project, queries] : j.at("projects").items()) {
            auto& ids = d.query_ids[project];
            auto& vals = d.values[project];
            for (const auto& q : queries) {
                ids.push_back(q.at("query_id").get<std::string>());
                for (std::size_t k = 0; k < 5; ++k) {
                    vals[k].push_back(q.at(kQueryMetricNames[k]).get<double>());
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source + ": " + e.what());
    }
    return d;
}

struct CompareRow {
    std::string project;
    std::string metric;
    StatTestResult test;
};

/// Tests, per project and metric, whether `b` is stochastically smaller
/// than `a`. Both dumps must cover the same projects and queries.
[[nodiscard]] inline std::vector<CompareRow> compare_dumps(const PerQueryDump& a, const PerQueryDump& b) {
    std::set<std::string> pa, pb;
    for (const auto& [k, v] : a.query_ids) pa.insert(k);
    for (const auto& [k, v] : b.query_ids) pb.insert(k);
    if (pa != pb) {
        throw ValidationError("per-query dumps cover different projects");
    }
    for (const auto& p : pa) {
        if (a.query_ids.at(p) != b.query_ids.at(p)) {
            throw ValidationError("per-query dumps disagree on the queries of project " + p);
        }
    }
    std::vector<CompareRow> rows;
    std::vector<double> raw;
    for (const auto& p : pa) {
        for (std::size_t k = 0; k < 5; ++k) {
            const auto& xs = a.values.at(p)[k];
            const auto& ys = b.values.at(p)[k];
            CompareRow row{p, kQueryMetricNames[k], {}};
            const auto mw = mann_whitney_one_tailed(xs, ys);
            const auto cd = cliffs_delta(xs, ys);
            row.test.u_statistic = mw.u;
            row.test.p_value = mw.p_value;
            row.test.cliffs_delta = cd.delta;
            row.test.interpretation = cd.interpretation;
            raw.push_back(mw.p_value);
            rows.push_back(std::move(row));
        }
    }
    const auto adjusted = bonferroni(raw, raw.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].test.p_adjusted = adjusted[i];
    }
    return rows;
}

struct CompareOptions {
    std::filesystem::path a;
    std::filesystem::path b;
    std::filesystem::path out;  // .json for JSON, anything else CSV
};

inline std::vector<CompareRow> cmd_compare(const CompareOptions& opt, std::ostream& log) {
    const PerQueryDump a = parse_per_query_dump(detail::read_text_file(opt.a), opt.a.string());
    const PerQueryDump b = parse_per_query_dump(detail::read_text_file(opt.b), opt.b.string());
    const auto rows = compare_dumps(a, b);
    if (opt.out.extension() == ".json") {
        json doc;
        doc["a"] = a.method;
        doc["b"] = b.method;
        doc["tests"] = rows.size();
        doc["rows"] = json::array();
        for (const auto& r : rows) {
            doc["rows"].push_back({{"project", r.project},
                                   {"metric", r.metric},
                                   {"u_statistic", num(r.test.u_statistic)},
                                   {"p_value", num(r.test.p_value)},
                                   {"p_adjusted", num(r.test.p_adjusted)},
                                   {"cliffs_delta", num(r.test.cliffs_delta)},
                                   {"interpretation", to_string(r.test.interpretation)}});
        }
        detail::write_text_file(opt.out, doc.dump(2) + "\n");
    } else {
        std::string csv = "a,b,project,metric,u_statistic,p_value,p_adjusted,cliffs_delta,interpretation\n";
        for (const auto& r : rows) {
            csv += a.method + "," + b.method + "," + r.project + "," + r.metric + "," +
                   detail::format_sig9(r.test.u_statistic) + "," + detail::format_sig9(r.test.p_value) + "," +
                   detail::format_sig9(r.test.p_adjusted) + "," + detail::format_sig9(r.test.cliffs_delta) + "," +
                   to_string(r.test.interpretation) + "\n";
        }
        detail::write_text_file(opt.out, csv);
    }
    log << "compared " << a.method << " vs " << b.method << ": " << rows.size() << " tests -> " << opt.out.string()
        << '\n';
    return rows;
}

// ---------------------------------------------------------------------------
// tune
// ---------------------------------------------------------------------------

struct TuneOptions {
    std::filesystem::path stores;  // a store file or a directory of *.store files
    std::filesystem::path corpus;
    std::string holdout;
    double grid_step = 0.01;
    std::string mask = "full";
    std::string unique_label = kDefaultUniqueLabel;
};

/// Loads every project from a store file, or from each *.store file of a
/// directory in name order.
[[nodiscard]] inline std::vector<ProjectFeatures> load_store_projects(const std::filesystem::path& stores) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(stores)) {
        for (const auto& entry : std::filesystem::directory_iterator(stores)) {
            if (entry.is_regular_file() && entry.path().extension() == ".store") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            throw IoError("no .store files in " + stores.string());
        }
    } else {
        files.push_back(stores);
    }
    std::vector<ProjectFeatures> projects;
    std::set<std::string> seen;
    for (const auto& f : files) {
        for (auto& p : load_feature_store(f).projects) {
            if (!seen.insert(p.features.project_id).second) {
                throw ValidationError("project " + p.features.project_id + " appears in more than one store");
            }
            projects.push_back(std::move(p.features));
        }
    }
    return projects;
}

[[nodiscard]] inline json tuning_json(const LeaveOneOutResult& r) {
    json j;
    j["holdout"] = r.tuning.holdout_id;
    j["thres"] = num(r.tuning.thres);
    j["training_map"] = num(r.tuning.training_map);
    json h;
    const auto values = metric_values(r.holdout);
    for (std::size_t k = 0; k < values.size(); ++k) {
        h[kMetricNames[k]] = num(values[k]);
    }
    j["holdout_metrics"] = std::move(h);
    j["grid"] = json::array();
    for (const auto& g : r.tuning.grid) {
        j["grid"].push_back({{"thres", num(g.thres)}, {"mean_map", num(g.mean_map)}});
    }
    return j;
}

inline json cmd_tune(const TuneOptions& opt, std::ostream& out) {
    const auto projects = load_store_projects(opt.stores);
    if (projects.size() < 2) {
        throw ConfigError("tuning needs at least two projects, found " + std::to_string(projects.size()));
    }
    LoadOptions load;
    load.check_images = false;
    const Corpus corpus = load_corpus(opt.corpus, load);
    const CorpusLabels labels(corpus, opt.unique_label);
    const auto grid = threshold_grid(opt.grid_step);
    const auto result = leave_one_out(projects, opt.holdout, labels, FeatureMask::parse(opt.mask), grid);
    json j = tuning_json(result);
    out << j.dump(2) << '\n';
    return j;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthOptions {
    std::filesystem::path spec;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
};

inline synth::WrittenCorpus cmd_synth(const SynthOptions& opt, std::ostream& log) {
    synth::GeneratorSpec spec;
    try {
        nlohmann::json::parse(detail::read_text_file(opt.spec)).get_to(spec);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(opt.spec.string() + ": " + e.what());
    }
    if (opt.seed) {
        spec.seed = *opt.seed;
    }
    const auto corpus = synth::generate_corpus(spec);
    const auto written = synth::write_corpus(corpus, opt.out);
    std::size_t reports = 0;
    for (const auto& p : corpus.projects) {
        reports += p.project.reports.size();
    }
    log << "generated " << reports << " reports, " << corpus.images.size() << " images -> " << opt.out.string()
        << '\n';
    return written;
}

}  // namespace setu::commands
