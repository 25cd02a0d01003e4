// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "setu/detail/io.hpp"
#include "setu/error.hpp"

namespace setu {

enum class Assessment { passed, failed };

/// One crowdtesting report. Immutable once loaded.
struct Report {
    std::string report_id;
    std::string project_id;
    std::string environment;
    std::string input_steps;
    std::string result_description;
    std::optional<std::string> screenshot;  // relative to the corpus image root
    std::string label;
    Assessment assessment = Assessment::passed;

    /// Text used for featurization: operation steps followed by the result description.
    [[nodiscard]] std::string description_text() const {
        if (input_steps.empty()) {
            return result_description;
        }
        if (result_description.empty()) {
            return input_steps;
        }
        return input_steps + "\n" + result_description;
    }
};

/// Reports of one project, in ingestion order. Ingestion order is the
/// canonical order used for deterministic tie-breaking downstream.
struct Project {
    std::string project_id;
    std::vector<Report> reports;

    [[nodiscard]] std::size_t size() const noexcept { return reports.size(); }

    [[nodiscard]] std::optional<std::size_t> index_of(const std::string& report_id) const {
        for (std::size_t i = 0; i < reports.size(); ++i) {
            if (reports[i].report_id == report_id) {
                return i;
            }
        }
        return std::nullopt;
    }
};

struct Corpus {
    std::filesystem::path image_root;
    std::vector<Project> projects;

    [[nodiscard]] const Project* find(const std::string& project_id) const {
        for (const auto& p : projects) {
            if (p.project_id == project_id) {
                return &p;
            }
        }
        return nullptr;
    }
};

inline constexpr const char* kDefaultUniqueLabel = "UNIQUE";

/// Label-derived duplicate sets for one project. duplicates[i] holds the
/// sorted canonical indices of reports sharing report i's label (i excluded).
struct GroundTruth {
    std::string project_id;
    std::vector<std::string> report_ids;
    std::vector<std::vector<std::size_t>> duplicates;

    [[nodiscard]] std::size_t size() const noexcept { return report_ids.size(); }

    [[nodiscard]] bool has_duplicates(std::size_t i) const { return !duplicates.at(i).empty(); }

    [[nodiscard]] std::optional<std::size_t> index_of(const std::string& report_id) const {
        for (std::size_t i = 0; i < report_ids.size(); ++i) {
            if (report_ids[i] == report_id) {
                return i;
            }
        }
        return std::nullopt;
    }

    [[nodiscard]] std::set<std::string> of(const std::string& report_id) const {
        const auto idx = index_of(report_id);
        if (!idx) {
            throw ValidationError("report not in ground truth: " + report_id);
        }
        std::set<std::string> out;
        for (std::size_t j : duplicates[*idx]) {
            out.insert(report_ids[j]);
        }
        return out;
    }
};

struct CorpusStats {
    std::uint64_t n_reports = 0;
    std::uint64_t n_with_screenshot = 0;
    double pct_screenshot = 0.0;
    std::uint64_t n_with_duplicates = 0;
    double pct_duplicates = 0.0;
    std::uint64_t total_pairs = 0;
    std::uint64_t dup_pairs = 0;
    double pct_dup_pairs = 0.0;
};

[[nodiscard]] constexpr std::uint64_t pair_count(std::uint64_t n) noexcept {
    return n < 2 ? 0 : n * (n - 1) / 2;
}

/// Reports carrying `unique_label` are treated as singletons.
[[nodiscard]] inline GroundTruth ground_truth(const Project& project,
                                              const std::string& unique_label = kDefaultUniqueLabel) {
    GroundTruth gt;
    gt.project_id = project.project_id;
    gt.report_ids.reserve(project.size());
    gt.duplicates.resize(project.size());

    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < project.size(); ++i) {
        const Report& r = project.reports[i];
        gt.report_ids.push_back(r.report_id);
        if (r.label != unique_label) {
            by_label[r.label].push_back(i);
        }
    }
    for (const auto& [label, members] : by_label) {
        for (std::size_t i : members) {
            auto& dups = gt.duplicates[i];
            dups.reserve(members.size() - 1);
            for (std::size_t j : members) {
                if (j != i) {
                    dups.push_back(j);
                }
            }
        }
    }
    return gt;
}

[[nodiscard]] inline CorpusStats corpus_stats(const Project& project, const GroundTruth& gt) {
    CorpusStats s;
    s.n_reports = project.size();
    for (const auto& r : project.reports) {
        if (r.screenshot) {
            ++s.n_with_screenshot;
        }
    }
    std::uint64_t ordered_dup_pairs = 0;
    for (const auto& dups : gt.duplicates) {
        if (!dups.empty()) {
            ++s.n_with_duplicates;
        }
        ordered_dup_pairs += dups.size();
    }
    s.total_pairs = pair_count(s.n_reports);
    s.dup_pairs = ordered_dup_pairs / 2;
    if (s.n_reports > 0) {
        s.pct_screenshot = static_cast<double>(s.n_with_screenshot) / static_cast<double>(s.n_reports);
        s.pct_duplicates = static_cast<double>(s.n_with_duplicates) / static_cast<double>(s.n_reports);
    }
    if (s.total_pairs > 0) {
        s.pct_dup_pairs = static_cast<double>(s.dup_pairs) / static_cast<double>(s.total_pairs);
    }
    return s;
}

namespace detail {

inline std::string optional_string(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return {};
    }
    if (!it->is_string()) {
        throw ParseError(where + ": field '" + key + "' must be a string");
    }
    return it->get<std::string>();
}

inline std::string required_string(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw ParseError(where + ": missing or non-string field '" + key + "'");
    }
    return it->get<std::string>();
}

}  // namespace detail

inline Report parse_record(const std::string& line, const std::string& where) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(where + ": " + e.what());
    }
    if (!obj.is_object()) {
        throw ParseError(where + ": record is not a JSON object");
    }
    Report r;
    r.report_id = detail::required_string(obj, "report_id", where);
    r.project_id = detail::required_string(obj, "project_id", where);
    r.label = detail::required_string(obj, "label", where);
    r.environment = detail::optional_string(obj, "environment", where);
    r.input_steps = detail::optional_string(obj, "input_steps", where);
    r.result_description = detail::optional_string(obj, "result_description", where);

    if (const auto it = obj.find("screenshot"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) {
            throw ParseError(where + ": field 'screenshot' must be a string or null");
        }
        if (!it->get<std::string>().empty()) {
            r.screenshot = it->get<std::string>();
        }
    }
    const std::string assessment = detail::optional_string(obj, "assessment", where);
    if (assessment.empty() || assessment == "passed") {
        r.assessment = Assessment::passed;
    } else if (assessment == "failed") {
        r.assessment = Assessment::failed;
    } else {
        throw ParseError(where + ": unknown assessment '" + assessment + "'");
    }
    if (r.report_id.empty()) {
        throw ParseError(where + ": empty report_id");
    }
    if (r.label.empty()) {
        throw ValidationError(where + ": empty label for report " + r.report_id);
    }
    return r;
}

/// Parses a line-delimited record file. Blank lines are skipped; line
/// numbers in errors are 1-based.
inline std::vector<Report> parse_records(const std::string& text, const std::string& source = "<records>") {
    std::vector<Report> out;
    const auto lines = detail::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        out.push_back(parse_record(lines[i], source + ":" + std::to_string(i + 1)));
    }
    return out;
}

inline std::string record_to_json_line(const Report& r) {
    nlohmann::ordered_json obj;
    obj["report_id"] = r.report_id;
    obj["project_id"] = r.project_id;
    obj["environment"] = r.environment;
    obj["input_steps"] = r.input_steps;
    obj["result_description"] = r.result_description;
    obj["screenshot"] = r.screenshot ? nlohmann::ordered_json(*r.screenshot) : nlohmann::ordered_json(nullptr);
    obj["label"] = r.label;
    obj["assessment"] = r.assessment == Assessment::passed ? "passed" : "failed";
    return obj.dump();
}

struct LoadOptions {
    bool check_images = true;
};

/// Assembles a project from parsed records, enforcing the corpus invariants.
inline Project make_project(std::string project_id, std::vector<Report> reports) {
    std::unordered_set<std::string> seen;
    for (const auto& r : reports) {
        if (r.project_id != project_id) {
            throw ValidationError("report " + r.report_id + " has project_id '" + r.project_id +
                                  "' but belongs to project '" + project_id + "'");
        }
        if (!seen.insert(r.report_id).second) {
            throw ValidationError("duplicate report_id '" + r.report_id + "' in project " + project_id);
        }
    }
    return Project{std::move(project_id), std::move(reports)};
}

/// Loads a corpus manifest:
///   {"image_root": "images", "projects": [{"project_id": "P1", "records": "P1.jsonl"}, ...]}
/// Relative paths resolve against the manifest's directory.
inline Corpus load_corpus(const std::filesystem::path& manifest_path, const LoadOptions& options = {}) {
    const std::string text = detail::read_text_file(manifest_path);
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(manifest_path.string() + ": " + e.what());
    }
    const std::filesystem::path base = manifest_path.parent_path();
    if (!manifest.is_object() || !manifest.contains("projects") || !manifest["projects"].is_array()) {
        throw ParseError(manifest_path.string() + ": manifest needs a 'projects' array");
    }

    Corpus corpus;
    const std::string image_root = manifest.value("image_root", std::string("images"));
    corpus.image_root = base / image_root;

    std::unordered_set<std::string> all_ids;
    std::vector<std::string> missing;
    for (const auto& entry : manifest["projects"]) {
        if (!entry.is_object() || !entry.contains("records") || !entry["records"].is_string()) {
            throw ParseError(manifest_path.string() + ": project entry needs a 'records' path");
        }
        const std::filesystem::path records_path = base / entry["records"].get<std::string>();
        auto reports = parse_records(detail::read_text_file(records_path), records_path.string());

        std::string project_id = entry.value("project_id", std::string());
        if (project_id.empty()) {
            if (reports.empty()) {
                throw ValidationError(records_path.string() + ": cannot infer project_id from empty file");
            }
            project_id = reports.front().project_id;
        }
        for (const auto& r : reports) {
            if (!all_ids.insert(r.report_id).second) {
                throw ValidationError("duplicate report_id '" + r.report_id + "' in " + records_path.string());
            }
            if (options.check_images && r.screenshot &&
                !std::filesystem::is_regular_file(corpus.image_root / *r.screenshot)) {
                missing.push_back((corpus.image_root / *r.screenshot).string());
            }
        }
        corpus.projects.push_back(make_project(std::move(project_id), std::move(reports)));
    }
    if (!missing.empty()) {
        std::string msg = "missing screenshot files:";
        for (const auto& m : missing) {
            msg += "\n  " + m;
        }
        throw ValidationError(msg);
    }
    return corpus;
}

}  // namespace setu
