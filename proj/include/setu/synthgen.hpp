// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "setu/corpus.hpp"
#include "setu/error.hpp"
#include "setu/image.hpp"
#include "setu/image_features.hpp"
#include "setu/pipeline.hpp"
#include "setu/ranker.hpp"
#include "setu/similarity.hpp"
#include "setu/text_features.hpp"

namespace setu::synth {

/// Thin wrapper over mt19937_64. Distributions are implemented here rather
/// than with <random> distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, n).
    std::size_t index(std::size_t n) {
        if (n == 0) {
            throw ConfigError("Rng::index with empty range");
        }
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v = 0;
        do {
            v = engine_();
        } while (v >= limit);
        return static_cast<std::size_t>(v % n);
    }

    /// Uniform in [lo, hi].
    int between(int lo, int hi) { return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1))); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return uniform() < p; }

    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Mixes a base seed with a stream id so sub-generators are independent.
[[nodiscard]] inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Synthetic screenshots
// ---------------------------------------------------------------------------

[[nodiscard]] inline Rgb hsv_to_rgb(double hue, double sat, double val) {
    const double c = val * sat;
    const double hp = std::fmod(hue, 360.0) / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else { r = c; b = x; }
    const double m = val - c;
    const auto to8 = [&](double v) { return static_cast<std::uint8_t>(std::clamp(std::lround((v + m) * 255.0), 0L, 255L)); };
    return {to8(r), to8(g), to8(b)};
}

enum class Pattern { solid, text_lines, vertical_bars, diagonal, anti_diagonal, checker, circle };

struct Panel {
    // Fractions of the image size so layouts render at any resolution.
    double x0, y0, x1, y1;
    Rgb fill;
    Rgb ink;
    Pattern pattern;
};

/// A procedurally generated app screen: background, header bar and panels.
struct Layout {
    Rgb background;
    Rgb header;
    double header_height = 0.1;
    std::vector<Panel> panels;
};

/// Palette colors sit at hue-bin centers with saturation and value well
/// clear of the achromatic cut, and grays at value-quintile centers, so
/// small pixel noise never moves a pixel to another color bin.
[[nodiscard]] inline Layout random_layout(Rng& rng) {
    const auto color = [&](double smin, double vmin) {
        const double hue = (static_cast<double>(rng.index(kHueBins)) + 0.5) * (360.0 / kHueBins);
        return hsv_to_rgb(hue, smin + rng.uniform() * (1.0 - smin), vmin + rng.uniform() * (1.0 - vmin));
    };
    const auto gray = [&] {
        const auto v = static_cast<std::uint8_t>(25 + 51 * rng.index(2));
        return Rgb{v, v, v};
    };
    const auto far_apart = [](const Rgb& a, const Rgb& b) { return std::abs(luma(a) - luma(b)) >= 60000.0; };
    Layout l;
    l.background = color(0.3, 0.5);
    do {
        l.header = color(0.4, 0.3);
    } while (!far_apart(l.header, l.background));
    l.header_height = 0.06 + rng.uniform() * 0.12;
    const int n = rng.between(3, 6);
    for (int i = 0; i < n; ++i) {
        Panel p{};
        const double w = 0.25 + rng.uniform() * 0.6;
        const double h = 0.12 + rng.uniform() * 0.35;
        p.x0 = rng.uniform() * (1.0 - w);
        p.y0 = l.header_height + rng.uniform() * std::max(0.0, 1.0 - l.header_height - h);
        p.x1 = p.x0 + w;
        p.y1 = std::min(1.0, p.y0 + h);
        do {
            p.fill = color(0.3, 0.4);
        } while (!far_apart(p.fill, l.background));
        do {
            p.ink = rng.chance(0.5) ? gray() : color(0.5, 0.3);
        } while (!far_apart(p.ink, p.fill));
        p.pattern = static_cast<Pattern>(rng.index(7));
        l.panels.push_back(p);
    }
    return l;
}

/// Renders a layout; `noise` adds independent uniform integer noise in
/// [-noise, noise] to every channel.
[[nodiscard]] inline RasterImage render_layout(const Layout& layout, std::size_t width, std::size_t height,
                                               std::uint64_t noise_seed = 0, int noise = 0) {
    RasterImage img(width, height, layout.background);
    const auto px = [&](double f, std::size_t extent) {
        return static_cast<std::size_t>(std::clamp(std::lround(f * static_cast<double>(extent)), 0L,
                                                   static_cast<long>(extent)));
    };
    const std::size_t header_end = px(layout.header_height, height);
    for (std::size_t y = 0; y < height; ++y) {
        // header bar, then list separators in the header color
        if (y < header_end || (y - header_end) % 12 == 11) {
            for (std::size_t x = 0; x < width; ++x) {
                img.at(x, y) = layout.header;
            }
        }
    }
    for (const Panel& p : layout.panels) {
        const std::size_t x0 = px(p.x0, width), x1 = px(p.x1, width);
        const std::size_t y0 = px(p.y0, height), y1 = px(p.y1, height);
        const double cx = (x0 + x1) / 2.0, cy = (y0 + y1) / 2.0;
        const double radius = std::min(x1 - x0, y1 - y0) / 3.0;
        for (std::size_t y = y0; y < y1; ++y) {
            for (std::size_t x = x0; x < x1; ++x) {
                const std::size_t lx = x - x0, ly = y - y0;
                // every panel carries a 1-pixel ink frame
                bool ink = lx == 0 || ly == 0 || x + 1 == x1 || y + 1 == y1;
                switch (p.pattern) {
                    case Pattern::solid: break;
                    case Pattern::text_lines: ink |= ly % 7 >= 4 && lx >= 3 && lx + 3 < (x1 - x0); break;
                    case Pattern::vertical_bars: ink |= lx % 6 < 2; break;
                    case Pattern::diagonal: ink |= ((lx + ly) / 4) % 2 == 0; break;
                    case Pattern::anti_diagonal: ink |= ((lx + 4096 - ly) / 4) % 2 == 0; break;
                    case Pattern::checker: ink |= ((lx / 6) + (ly / 6)) % 2 == 0; break;
                    case Pattern::circle: ink |= std::hypot(x - cx, y - cy) <= radius; break;
                }
                img.at(x, y) = ink ? p.ink : p.fill;
            }
        }
    }
    if (noise > 0) {
        Rng rng(noise_seed);
        const auto jitter = [&](std::uint8_t v) {
            return static_cast<std::uint8_t>(std::clamp(static_cast<int>(v) + rng.between(-noise, noise), 0, 255));
        };
        for (Rgb& p : img.pixels()) {
            p = {jitter(p.r), jitter(p.g), jitter(p.b)};
        }
    }
    return img;
}

[[nodiscard]] inline double screenshot_similarity(const ScreenshotDescriptors& a, const ScreenshotDescriptors& b) {
    const double s = std::clamp(cosine(a.structure.values, b.structure.values), 0.0, 1.0);
    const double c = std::clamp(cosine(a.color.values, b.color.values), 0.0, 1.0);
    return (s + c) / 2.0;
}

/// Clean renders of library layouts stay at or below this screenshot
/// similarity to each other.
inline constexpr double kLayoutDistinctMax = 0.8;

/// Layouts that are pairwise distinct by construction (rejection sampling
/// against every earlier member).
class LayoutLibrary {
public:
    LayoutLibrary(std::uint64_t seed, std::size_t width, std::size_t height)
        : rng_(seed), width_(width), height_(height) {}

    /// Adds a new distinct layout and returns its id.
    std::size_t add() {
        for (int attempt = 0; attempt < 500; ++attempt) {
            Layout candidate = random_layout(rng_);
            const auto desc = describe_screenshot(render_layout(candidate, width_, height_));
            const bool distinct = std::all_of(descriptors_.begin(), descriptors_.end(), [&](const auto& d) {
                return screenshot_similarity(d, desc) <= kLayoutDistinctMax;
            });
            if (distinct) {
                layouts_.push_back(std::move(candidate));
                descriptors_.push_back(desc);
                return layouts_.size() - 1;
            }
        }
        throw ConfigError("could not find a distinct layout after 500 attempts (" + std::to_string(layouts_.size()) +
                          " layouts in library)");
    }

    [[nodiscard]] const Layout& layout(std::size_t id) const { return layouts_.at(id); }
    [[nodiscard]] std::size_t size() const noexcept { return layouts_.size(); }
    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t height() const noexcept { return height_; }

    [[nodiscard]] RasterImage render(std::size_t id, std::uint64_t noise_seed, int noise) const {
        return render_layout(layout(id), width_, height_, noise_seed, noise);
    }

private:
    Rng rng_;
    std::size_t width_;
    std::size_t height_;
    std::vector<Layout> layouts_;
    std::vector<ScreenshotDescriptors> descriptors_;
};

// ---------------------------------------------------------------------------
// Corpus generation
// ---------------------------------------------------------------------------

struct GeneratorSpec {
    std::uint64_t seed = 1;
    std::size_t n_projects = 1;
    std::size_t n_clusters = 4;
    std::size_t cluster_size_min = 2;
    std::size_t cluster_size_max = 4;
    std::size_t n_singletons = 0;       // reports without any duplicate
    std::size_t vocabulary_size = 500;
    std::size_t core_tokens = 8;        // per-cluster token pool size
    std::size_t tokens_per_report = 12;
    double intra_overlap = 0.8;         // P(token drawn from the cluster pool)
    double cross_overlap = 0.1;         // P(token drawn from the shared pool)
    double screenshot_reuse = 0.9;      // P(report re-renders its cluster's layout)
    double screenshot_coverage = 0.94;  // P(report has a screenshot)
    double stopword_rate = 0.1;
    double synonym_rate = 0.1;
    std::size_t pattern1_pairs = 0;     // same tokens, different layout, different label
    std::size_t pattern2_pairs = 0;     // same screenshot, disjoint tokens, different label
    std::size_t image_width = 96;
    std::size_t image_height = 160;
    int noise = 1;
    std::size_t embedding_dim = kDefaultEmbeddingDim;
};

inline void to_json(nlohmann::json& j, const GeneratorSpec& s) {
    j = nlohmann::json{{"seed", s.seed},
                       {"n_projects", s.n_projects},
                       {"n_clusters", s.n_clusters},
                       {"cluster_size_min", s.cluster_size_min},
                       {"cluster_size_max", s.cluster_size_max},
                       {"n_singletons", s.n_singletons},
                       {"vocabulary_size", s.vocabulary_size},
                       {"core_tokens", s.core_tokens},
                       {"tokens_per_report", s.tokens_per_report},
                       {"intra_overlap", s.intra_overlap},
                       {"cross_overlap", s.cross_overlap},
                       {"screenshot_reuse", s.screenshot_reuse},
                       {"screenshot_coverage", s.screenshot_coverage},
                       {"stopword_rate", s.stopword_rate},
                       {"synonym_rate", s.synonym_rate},
                       {"pattern1_pairs", s.pattern1_pairs},
                       {"pattern2_pairs", s.pattern2_pairs},
                       {"image_width", s.image_width},
                       {"image_height", s.image_height},
                       {"noise", s.noise},
                       {"embedding_dim", s.embedding_dim}};
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline void from_json(const nlohmann::json& j, GeneratorSpec& s) {
    if (!j.is_object()) {
        throw ParseError("generator spec must be a JSON object");
    }
    const nlohmann::json defaults = GeneratorSpec{};
    for (const auto& [key, value] : j.items()) {
        if (!defaults.contains(key)) {
            throw ParseError("unknown generator spec key '" + key + "'");
        }
    }
    try {
        const auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) {
                j.at(key).get_to(field);
            }
        };
        get("seed", s.seed);
        get("n_projects", s.n_projects);
        get("n_clusters", s.n_clusters);
        get("cluster_size_min", s.cluster_size_min);
        get("cluster_size_max", s.cluster_size_max);
        get("n_singletons", s.n_singletons);
        get("vocabulary_size", s.vocabulary_size);
        get("core_tokens", s.core_tokens);
        get("tokens_per_report", s.tokens_per_report);
        get("intra_overlap", s.intra_overlap);
        get("cross_overlap", s.cross_overlap);
        get("screenshot_reuse", s.screenshot_reuse);
        get("screenshot_coverage", s.screenshot_coverage);
        get("stopword_rate", s.stopword_rate);
        get("synonym_rate", s.synonym_rate);
        get("pattern1_pairs", s.pattern1_pairs);
        get("pattern2_pairs", s.pattern2_pairs);
        get("image_width", s.image_width);
        get("image_height", s.image_height);
        get("noise", s.noise);
        get("embedding_dim", s.embedding_dim);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("generator spec: ") + e.what());
    }
}

inline void validate(const GeneratorSpec& s) {
    const auto rate = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ConfigError(std::string("generator spec: ") + name + " must lie in [0, 1]");
        }
    };
    rate(s.intra_overlap, "intra_overlap");
    rate(s.cross_overlap, "cross_overlap");
    rate(s.screenshot_reuse, "screenshot_reuse");
    rate(s.screenshot_coverage, "screenshot_coverage");
    rate(s.stopword_rate, "stopword_rate");
    rate(s.synonym_rate, "synonym_rate");
    if (s.intra_overlap + s.cross_overlap > 1.0 + 1e-12) {
        throw ConfigError("generator spec: intra_overlap + cross_overlap exceeds 1");
    }
    if (s.n_projects == 0) {
        throw ConfigError("generator spec: n_projects must be at least 1");
    }
    if (s.cluster_size_min < 2 || s.cluster_size_max < s.cluster_size_min) {
        throw ConfigError("generator spec: cluster sizes need 2 <= min <= max");
    }
    if (s.tokens_per_report == 0 || s.core_tokens == 0) {
        throw ConfigError("generator spec: token counts must be positive");
    }
    if (s.image_width < 8 || s.image_height < 8) {
        throw ConfigError("generator spec: images must be at least 8x8");
    }
    if (s.noise < 0 || s.noise > 32) {
        throw ConfigError("generator spec: noise must lie in [0, 32]");
    }
    if (s.embedding_dim == 0) {
        throw ConfigError("generator spec: embedding_dim must be positive");
    }
    const std::size_t shared = s.cross_overlap > 0.0 ? 1 : 0;
    if (s.n_clusters * s.core_tokens + shared > s.vocabulary_size) {
        throw ConfigError("generator spec: vocabulary too small for the cluster pools");
    }
    const std::size_t confusables = s.pattern1_pairs + s.pattern2_pairs;
    if (confusables > 0 && s.n_clusters == 0) {
        throw ConfigError("generator spec: confusable pairs need at least one cluster");
    }
    if (confusables > s.n_clusters * s.cluster_size_min) {
        throw ConfigError("generator spec: more confusable pairs than cluster reports to pair with");
    }
    // confusables are paired with a query that shows its cluster's layout
    if (confusables > 0 && (s.screenshot_coverage == 0.0 || s.screenshot_reuse == 0.0)) {
        throw ConfigError("generator spec: confusable pairs need screenshots that reuse the cluster layout");
    }
}

enum class ConfusablePattern { same_text_different_screen = 1, same_screen_different_text = 2 };

struct ConfusablePair {
    std::string query_id;
    std::string confusable_id;
    ConfusablePattern pattern;
};

struct GeneratedProject {
    Project project;
    std::vector<ConfusablePair> confusables;
};

/// A generated corpus with its language resources and rendered screenshots.
struct GeneratedCorpus {
    GeneratorSpec spec;
    std::vector<GeneratedProject> projects;
    std::map<std::string, RasterImage> images;  // path relative to image root -> raster
    std::vector<std::string> stopwords;
    std::vector<std::pair<std::string, std::string>> synonyms;  // canonical, variant
    EmbeddingTable embeddings;
};

inline const std::vector<std::string>& synthetic_stopwords() {
    static const std::vector<std::string> words = {"the", "a", "on", "is", "to", "of", "and", "then"};
    return words;
}

namespace detail {

inline std::string word_name(std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "w%04zu", i);
    return buf;
}

inline std::string join_tokens(const std::vector<std::string>& tokens, std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
        if (!out.empty()) {
            out += ' ';
        }
        out += tokens[i];
    }
    return out;
}

struct Draft {
    Report report;
    std::vector<std::string> tokens;
    std::size_t cluster = 0;
    bool on_cluster_layout = false;
};

inline GeneratedProject generate_project(const GeneratorSpec& spec, std::size_t project_index,
                                         const std::vector<std::string>& vocabulary,
                                         std::map<std::string, RasterImage>& images) {
    Rng rng(derive_seed(spec.seed, 2 * project_index + 1));
    LayoutLibrary library(derive_seed(spec.seed, 2 * project_index + 2), spec.image_width, spec.image_height);
    const std::string pid = "P" + std::to_string(project_index + 1);

    // Partition a shuffled vocabulary into cluster pools and a shared pool.
    std::vector<std::string> words = vocabulary;
    rng.shuffle(words);
    std::vector<std::vector<std::string>> pools(spec.n_clusters);
    std::size_t next_word = 0;
    for (auto& pool : pools) {
        pool.assign(words.begin() + static_cast<std::ptrdiff_t>(next_word),
                    words.begin() + static_cast<std::ptrdiff_t>(next_word + spec.core_tokens));
        next_word += spec.core_tokens;
    }
    const std::vector<std::string> shared(words.begin() + static_cast<std::ptrdiff_t>(next_word), words.end());

    std::size_t filler_counter = 0;
    const auto filler = [&] {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "x%zup%zu", filler_counter++, project_index + 1);
        return std::string(buf);
    };
    const auto maybe_variant = [&](const std::string& w) {
        return rng.chance(spec.synonym_rate) ? w + "v" : w;
    };
    const auto sample_tokens = [&](const std::vector<std::string>* pool) {
        std::vector<std::string> tokens;
        for (std::size_t k = 0; k < spec.tokens_per_report; ++k) {
            const double u = rng.uniform();
            if (pool && u < spec.intra_overlap) {
                tokens.push_back(maybe_variant((*pool)[rng.index(pool->size())]));
            } else if (u < spec.intra_overlap + spec.cross_overlap && !shared.empty()) {
                tokens.push_back(maybe_variant(shared[rng.index(shared.size())]));
            } else {
                tokens.push_back(filler());
            }
            if (rng.chance(spec.stopword_rate)) {
                const auto& sw = synthetic_stopwords();
                tokens.push_back(sw[rng.index(sw.size())]);
            }
        }
        return tokens;
    };

    std::size_t report_counter = 0;
    std::size_t noise_stream = 0;
    const auto screenshot_of = [&](std::size_t layout) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s/%s_s%04zu.png", pid.c_str(), pid.c_str(), noise_stream);
        const std::string path = buf;
        images.emplace(path, library.render(layout, derive_seed(spec.seed, 1000003 * (project_index + 1) + noise_stream),
                                            spec.noise));
        ++noise_stream;
        return path;
    };
    const auto new_report = [&](const std::string& label) {
        Report r;
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%s-r%04zu", pid.c_str(), ++report_counter);
        r.report_id = buf;
        r.project_id = pid;
        r.label = label;
        r.environment = "phone-" + std::to_string(rng.between(1, 9)) + " os-" + std::to_string(rng.between(7, 13));
        r.assessment = rng.chance(0.9) ? Assessment::passed : Assessment::failed;
        return r;
    };
    const auto set_text = [](Report& r, const std::vector<std::string>& tokens) {
        const std::size_t half = tokens.size() / 2;
        r.input_steps = join_tokens(tokens, 0, half);
        r.result_description = join_tokens(tokens, half, tokens.size());
    };

    std::vector<Draft> drafts;
    std::vector<std::size_t> cluster_layout(spec.n_clusters);
    for (std::size_t c = 0; c < spec.n_clusters; ++c) {
        cluster_layout[c] = library.add();
        const std::size_t size = spec.cluster_size_min + rng.index(spec.cluster_size_max - spec.cluster_size_min + 1);
        for (std::size_t m = 0; m < size; ++m) {
            Draft d;
            d.report = new_report(pid + "-bug" + std::to_string(c + 1));
            d.cluster = c;
            d.tokens = sample_tokens(&pools[c]);
            if (rng.chance(spec.screenshot_coverage)) {
                d.on_cluster_layout = rng.chance(spec.screenshot_reuse);
                d.report.screenshot = screenshot_of(d.on_cluster_layout ? cluster_layout[c] : library.add());
            }
            drafts.push_back(std::move(d));
        }
    }
    for (std::size_t s = 0; s < spec.n_singletons; ++s) {
        Draft d;
        d.report = new_report(kDefaultUniqueLabel);
        d.cluster = spec.n_clusters;
        d.tokens = sample_tokens(nullptr);
        if (rng.chance(spec.screenshot_coverage)) {
            d.report.screenshot = screenshot_of(library.add());
        }
        drafts.push_back(std::move(d));
    }
    // Interleave clusters so ingestion order does not mirror labels.
    rng.shuffle(drafts);

    GeneratedProject out;
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        if (drafts[i].cluster < spec.n_clusters && drafts[i].on_cluster_layout) {
            eligible.push_back(i);
        }
    }
    rng.shuffle(eligible);
    const std::size_t wanted = spec.pattern1_pairs + spec.pattern2_pairs;
    if (eligible.size() < wanted) {
        throw ConfigError("generator spec: only " + std::to_string(eligible.size()) +
                          " reports share their cluster layout, " + std::to_string(wanted) + " confusables requested");
    }
    std::vector<Draft> confusables;
    for (std::size_t k = 0; k < wanted; ++k) {
        const Draft& q = drafts[eligible[k]];
        const bool first_pattern = k < spec.pattern1_pairs;
        Draft c;
        c.report = new_report(pid + "-conf" + std::to_string(k + 1));
        c.cluster = spec.n_clusters;
        if (first_pattern) {
            c.tokens = q.tokens;
            rng.shuffle(c.tokens);
            c.report.screenshot = screenshot_of(library.add());
        } else {
            for (std::size_t t = 0; t < spec.tokens_per_report; ++t) {
                c.tokens.push_back(filler());
            }
            c.report.screenshot = q.report.screenshot;
        }
        out.confusables.push_back({q.report.report_id, c.report.report_id,
                                   first_pattern ? ConfusablePattern::same_text_different_screen
                                                 : ConfusablePattern::same_screen_different_text});
        confusables.push_back(std::move(c));
    }

    out.project.project_id = pid;
    for (auto* list : {&drafts, &confusables}) {
        for (auto& d : *list) {
            set_text(d.report, d.tokens);
            out.project.reports.push_back(std::move(d.report));
        }
    }
    return out;
}

}  // namespace detail

/// Generates every project of the spec. Identical specs give identical output.
[[nodiscard]] inline GeneratedCorpus generate_corpus(const GeneratorSpec& spec) {
    validate(spec);
    GeneratedCorpus corpus;
    corpus.spec = spec;
    corpus.embeddings = EmbeddingTable(spec.embedding_dim);

    std::vector<std::string> vocabulary;
    vocabulary.reserve(spec.vocabulary_size);
    for (std::size_t i = 0; i < spec.vocabulary_size; ++i) {
        vocabulary.push_back(detail::word_name(i));
    }
    Rng emb_rng(derive_seed(spec.seed, 0));
    for (const auto& w : vocabulary) {
        std::vector<double> v(spec.embedding_dim);
        for (double& x : v) {
            x = emb_rng.normal();
        }
        corpus.embeddings.set(w, std::move(v));
        corpus.synonyms.emplace_back(w, w + "v");
    }
    corpus.stopwords = synthetic_stopwords();

    for (std::size_t p = 0; p < spec.n_projects; ++p) {
        corpus.projects.push_back(detail::generate_project(spec, p, vocabulary, corpus.images));
    }
    return corpus;
}

[[nodiscard]] inline Corpus to_corpus(const GeneratedCorpus& generated, std::filesystem::path image_root = "images") {
    Corpus c;
    c.image_root = std::move(image_root);
    for (const auto& p : generated.projects) {
        c.projects.push_back(p.project);
    }
    return c;
}

/// The corpus's language resources, as featurize would load them from disk.
[[nodiscard]] inline TextResources text_resources(const GeneratedCorpus& corpus) {
    TextResources res;
    res.stopwords = StopwordSet(corpus.stopwords.begin(), corpus.stopwords.end());
    for (const auto& [canonical, variant] : corpus.synonyms) {
        res.synonyms.add(canonical, variant);
    }
    res.embeddings = corpus.embeddings;
    return res;
}

/// Featurizes straight from the in-memory rasters, skipping PNG round trips.
[[nodiscard]] inline FeatureStore featurize_generated(const GeneratedCorpus& corpus) {
    const TextResources res = text_resources(corpus);
    FeatureStore store;
    store.embedding_dim = res.embeddings.dimension();
    for (const auto& gp : corpus.projects) {
        store.projects.push_back(featurize_project_with(
            gp.project,
            [&](const Report& r) {
                return r.screenshot ? describe_screenshot(corpus.images.at(*r.screenshot)) : blank_descriptor();
            },
            res));
    }
    return store;
}

struct WrittenCorpus {
    std::filesystem::path manifest;
    std::filesystem::path stopwords;
    std::filesystem::path synonyms;
    std::filesystem::path embeddings;
};

/// Writes manifest.json, one record file per project, PNG screenshots under
/// images/, the language resources and confusables.json.
inline WrittenCorpus write_corpus(const GeneratedCorpus& corpus, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "images");
    WrittenCorpus w{out_dir / "manifest.json", out_dir / "stopwords.txt", out_dir / "synonyms.txt",
                    out_dir / "embeddings.txt"};

    nlohmann::ordered_json manifest;
    manifest["image_root"] = "images";
    manifest["projects"] = nlohmann::ordered_json::array();
    nlohmann::ordered_json confusables = nlohmann::ordered_json::array();
    for (const auto& gp : corpus.projects) {
        const std::string file = gp.project.project_id + ".jsonl";
        std::string records;
        for (const auto& r : gp.project.reports) {
            records += record_to_json_line(r);
            records += '\n';
        }
        setu::detail::write_text_file(out_dir / file, records);
        manifest["projects"].push_back({{"project_id", gp.project.project_id}, {"records", file}});
        for (const auto& c : gp.confusables) {
            confusables.push_back({{"project_id", gp.project.project_id},
                                   {"query_id", c.query_id},
                                   {"confusable_id", c.confusable_id},
                                   {"pattern", static_cast<int>(c.pattern)}});
        }
    }
    for (const auto& [path, raster] : corpus.images) {
        save_png(raster, out_dir / "images" / path);
    }
    setu::detail::write_text_file(w.manifest, manifest.dump(2) + "\n");
    setu::detail::write_text_file(out_dir / "confusables.json", confusables.dump(2) + "\n");
    setu::detail::write_text_file(out_dir / "spec.json", nlohmann::json(corpus.spec).dump(2) + "\n");

    std::string stop;
    for (const auto& s : corpus.stopwords) {
        stop += s + "\n";
    }
    setu::detail::write_text_file(w.stopwords, stop);
    std::string syn;
    for (const auto& [canonical, variant] : corpus.synonyms) {
        syn += canonical + "\t" + variant + "\n";
    }
    setu::detail::write_text_file(w.synonyms, syn);
    save_embeddings(corpus.embeddings, w.embeddings);
    return w;
}

// ---------------------------------------------------------------------------
// Feature-level suite with a planted optimal threshold
// ---------------------------------------------------------------------------

/// Project whose hierarchical MAP-vs-threshold curve peaks at exactly one
/// grid point. Built directly at feature level: each triad holds a query, its
/// duplicate (screenshot similarity just above the peak, textual 0.5) and a
/// text-identical confusable (screenshot similarity just below the peak).
struct PlantedProject {
    Project project;
    ProjectFeatures features;
};

inline constexpr std::size_t kMaxPlantedTriads = 40;

[[nodiscard]] inline PlantedProject planted_threshold_project(std::uint64_t seed, const std::string& project_id,
                                                              double peak, std::size_t triads,
                                                              double grid_step = 0.01) {
    if (triads == 0 || triads > kMaxPlantedTriads) {
        throw ConfigError("planted project needs 1.." + std::to_string(kMaxPlantedTriads) + " triads");
    }
    if (!(peak - grid_step > 0.5 && peak + grid_step < 1.0)) {
        throw ConfigError("planted peak must leave one grid step inside (0.5, 1)");
    }
    Rng rng(seed);
    PlantedProject out;
    out.project.project_id = project_id;
    out.features.project_id = project_id;

    // Every report shares the blank color histogram, so s_color = 1 and
    // s_screenshot = (1 + s_structure) / 2.
    const ColorVector color = blank_descriptor().color;
    const auto bundle = [&](std::size_t triad, double cos_to_query, std::size_t side_axis,
                            std::uint32_t text_term, double emb_cos) {
        FeatureBundle f;
        f.has_screenshot = true;
        f.color = color;
        f.structure.values[3 * triad] = cos_to_query;
        f.structure.values[3 * triad + side_axis] = std::sqrt(1.0 - cos_to_query * cos_to_query);
        const auto base = static_cast<std::uint32_t>(3 * triad);
        f.tfidf.entries = {{base, 1.0}, {base + text_term, 1.0}};
        f.embedding.assign(2 * kMaxPlantedTriads, 0.0);
        f.embedding[2 * triad] = emb_cos;
        f.embedding[2 * triad + 1] = std::sqrt(1.0 - emb_cos * emb_cos);
        return f;
    };
    for (std::size_t t = 0; t < triads; ++t) {
        const double x_dup = peak + grid_step * (0.1 + 0.8 * rng.uniform());
        const double x_conf = peak - grid_step * (0.1 + 0.8 * rng.uniform());
        const std::string label = project_id + "-bug" + std::to_string(t + 1);
        const std::string base = project_id + "-t" + std::to_string(t + 1);

        const auto add = [&](const std::string& suffix, const std::string& lab, FeatureBundle f) {
            Report r;
            r.report_id = base + suffix;
            r.project_id = project_id;
            r.label = lab;
            out.project.reports.push_back(r);
            out.features.report_ids.push_back(r.report_id);
            out.features.bundles.push_back(std::move(f));
        };
        // query and confusable share terms {0, 1}; the duplicate has {0, 2} (cosine 0.5)
        add("q", label, bundle(t, 1.0, 1, 1, 1.0));
        add("d", label, bundle(t, 2.0 * x_dup - 1.0, 1, 2, 0.5));
        add("c", kDefaultUniqueLabel, bundle(t, 2.0 * x_conf - 1.0, 2, 1, 1.0));
    }
    return out;
}

}  // namespace setu::synth
