// Shared helpers for the test suites.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "setu/corpus.hpp"
#include "setu/ranker.hpp"
#include "setu/similarity.hpp"

#ifndef SETU_TEST_TMP
#define SETU_TEST_TMP "/tmp/setu_tests"
#endif

namespace fixtures {

/// Fresh, empty directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path(SETU_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline setu::Report report(const std::string& id, const std::string& label, const std::string& project = "P") {
    setu::Report r;
    r.report_id = id;
    r.project_id = project;
    r.label = label;
    return r;
}

inline setu::Project project_with_labels(const std::vector<std::string>& labels, const std::string& id = "P") {
    setu::Project p;
    p.project_id = id;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        p.reports.push_back(report("r" + std::to_string(i + 1), labels[i], id));
    }
    return p;
}

/// Bundle whose screenshot and textual group similarities against a
/// reference bundle are controlled through a single axis each.
///
/// All bundles share the blank color vector (s_color = 1), so
/// s_screenshot = (1 + structure cosine) / 2. Text vectors live in 2-d.
inline setu::FeatureBundle unit_bundle(double structure_cos, double text_cos) {
    setu::FeatureBundle b;
    b.has_screenshot = true;
    b.color.values[4] = 1.0;
    b.structure.values[0] = structure_cos;
    b.structure.values[1] = std::sqrt(std::max(0.0, 1.0 - structure_cos * structure_cos));
    b.tfidf.entries = {{0, text_cos}, {1, std::sqrt(std::max(0.0, 1.0 - text_cos * text_cos))}};
    if (b.tfidf.entries[1].weight == 0.0) b.tfidf.entries.pop_back();
    if (b.tfidf.entries[0].weight == 0.0) b.tfidf.entries.erase(b.tfidf.entries.begin());
    b.embedding = {text_cos, std::sqrt(std::max(0.0, 1.0 - text_cos * text_cos))};
    return b;
}

}  // namespace fixtures
