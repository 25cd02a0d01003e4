// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "setu/corpus.hpp"
#include "setu/detail/parallel.hpp"
#include "setu/error.hpp"
#include "setu/feature_store.hpp"
#include "setu/image.hpp"
#include "setu/image_features.hpp"
#include "setu/text_features.hpp"

namespace setu {

/// Language resources shared by every project of a corpus.
struct TextResources {
    SegmentationConfig segmentation;
    StopwordSet stopwords;
    SynonymMap synonyms;
    EmbeddingTable embeddings;
};

struct ResourcePaths {
    std::filesystem::path stopwords;
    std::filesystem::path synonyms;
    std::filesystem::path embeddings;
    std::optional<std::filesystem::path> segmentation;
};

[[nodiscard]] inline TextResources load_resources(const ResourcePaths& paths,
                                                  std::vector<std::string>* warnings = nullptr) {
    TextResources r;
    r.stopwords = load_stopwords(paths.stopwords);
    r.synonyms = load_synonyms(paths.synonyms);
    r.embeddings = load_embeddings(paths.embeddings, warnings);
    if (paths.segmentation) {
        r.segmentation = load_segmentation(*paths.segmentation);
    }
    return r;
}

/// Normalized tokens of a report's description text.
[[nodiscard]] inline TokenList report_tokens(const Report& report, const TextResources& res) {
    return normalize(tokenize(report.description_text(), res.segmentation), res.stopwords, res.synonyms);
}

/// Screenshot descriptors of a report; the blank default when it has none.
[[nodiscard]] inline ScreenshotDescriptors report_descriptors(const Report& report,
                                                              const std::filesystem::path& image_root) {
    if (!report.screenshot) {
        return blank_descriptor();
    }
    const std::filesystem::path path = image_root / *report.screenshot;
    try {
        return describe_screenshot(load_image(path));
    } catch (const Error& e) {
        throw DecodeError("report " + report.report_id + ": screenshot " + path.string() + ": " + e.what());
    }
}

/// Extracts all four features for every report of a project. The TF-IDF
/// model is fitted on this project's reports only. `describe` supplies the
/// screenshot descriptors of one report and must be safe to call concurrently.
template <typename Describe>
[[nodiscard]] StoredProject featurize_project_with(const Project& project, const Describe& describe,
                                                   const TextResources& res) {
    const std::size_t n = project.reports.size();
    if (n == 0) {
        throw ValidationError("project " + project.project_id + " has no reports");
    }
    std::vector<TokenList> tokens(n);
    std::vector<ScreenshotDescriptors> screens(n);
    detail::parallel_for(n, [&](std::size_t i) {
        tokens[i] = report_tokens(project.reports[i], res);
        screens[i] = describe(project.reports[i]);
    });

    StoredProject out;
    out.tfidf = build_tfidf_model(tokens);
    out.features.project_id = project.project_id;
    out.features.report_ids.resize(n);
    out.features.bundles.resize(n);
    detail::parallel_for(n, [&](std::size_t i) {
        const Report& r = project.reports[i];
        FeatureBundle& b = out.features.bundles[i];
        out.features.report_ids[i] = r.report_id;
        b.structure = screens[i].structure;
        b.color = screens[i].color;
        b.has_screenshot = r.screenshot.has_value();
        b.tfidf = tfidf_vector(tokens[i], out.tfidf);
        b.embedding = embed_report(tokens[i], res.embeddings);
    });
    return out;
}

[[nodiscard]] inline StoredProject featurize_project(const Project& project, const std::filesystem::path& image_root,
                                                     const TextResources& res) {
    return featurize_project_with(
        project, [&](const Report& r) { return report_descriptors(r, image_root); }, res);
}

[[nodiscard]] inline FeatureStore featurize_corpus(const Corpus& corpus, const TextResources& res) {
    FeatureStore store;
    store.embedding_dim = res.embeddings.dimension();
    for (const auto& p : corpus.projects) {
        store.projects.push_back(featurize_project(p, corpus.image_root, res));
    }
    return store;
}

}  // namespace setu
