#include <numeric>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "setu/error.hpp"
#include "setu/similarity.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace setu;
using Catch::Matchers::WithinAbs;

namespace {

FeatureBundle random_bundle(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> nd;
    FeatureBundle b;
    b.has_screenshot = true;
    for (double& v : b.structure.values) v = rng() % 3 ? 0.0 : u(rng);
    for (double& v : b.color.values) v = rng() % 4 ? 0.0 : u(rng);
    for (std::uint32_t i = 0; i < 30; ++i)
        if (rng() % 3 == 0) b.tfidf.entries.push_back({i, 0.5 + u(rng) * 4});
    b.embedding.resize(6);
    for (double& v : b.embedding) v = nd(rng);
    return b;
}

std::vector<double> dense(const TfIdfVector& v, std::size_t n) {
    std::vector<double> out(n, 0.0);
    for (const auto& e : v.entries) out[e.index] = e.weight;
    return out;
}

std::vector<double> as_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("cosine examples", "[similarity]") {
    const std::vector<double> e1 = {1, 0}, e2 = {0, 1};
    CHECK(cosine(e1, e1) == 1.0);
    CHECK(cosine(e1, e2) == 0.0);
    const std::vector<double> a = {1, 2, 3}, b = {4, 5, 6};
    CHECK_THAT(cosine(a, b), WithinAbs(32.0 / std::sqrt(14.0 * 77.0), 1e-15));
    CHECK_THAT(cosine(a, b), WithinAbs(0.974631846, 5e-10));
    const std::vector<double> zero = {0, 0, 0};
    CHECK(cosine(a, zero) == 0.0);
    CHECK(cosine(zero, zero) == 0.0);
    CHECK_THROWS_AS(cosine(a, e1), ConfigError);
}

TEST_CASE("sparse cosine agrees with the dense form", "[similarity]") {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_bundle(rng), b = random_bundle(rng);
        CHECK_THAT(cosine(a.tfidf, b.tfidf), WithinAbs(oracle::cosine(dense(a.tfidf, 30), dense(b.tfidf, 30)), 1e-12));
    }
    CHECK(cosine(TfIdfVector{}, TfIdfVector{{{0, 1.0}}}) == 0.0);
}

TEST_CASE("self-similarity is one everywhere", "[similarity]") {
    std::mt19937 rng(3);
    const auto a = random_bundle(rng);
    const auto s = score_pair(a, a);
    for (double v : {s.s_structure, s.s_color, s.s_tfidf, s.s_embedding, s.s_screenshot, s.s_textual, s.s_total}) {
        CHECK_THAT(v, WithinAbs(1.0, 1e-12));
    }
    // a zero feature vector scores 0 even against itself
    FeatureBundle blank = a;
    blank.structure = {};
    CHECK(score_pair(blank, blank).s_structure == 0.0);
}

TEST_CASE("masks average only enabled members", "[similarity]") {
    const auto q = fixtures::unit_bundle(1.0, 1.0);
    const auto c = fixtures::unit_bundle(0.6, 0.5);
    const auto full = score_pair(q, c);
    CHECK_THAT(full.s_structure, WithinAbs(0.6, 1e-12));
    CHECK_THAT(full.s_color, WithinAbs(1.0, 1e-12));
    CHECK_THAT(full.s_screenshot, WithinAbs(0.8, 1e-12));
    CHECK_THAT(full.s_textual, WithinAbs(0.5, 1e-12));
    CHECK_THAT(full.s_total, WithinAbs(0.65, 1e-12));

    const auto noclr = score_pair(q, c, FeatureMask::no_color());
    CHECK_THAT(noclr.s_screenshot, WithinAbs(0.6, 1e-12));
    CHECK(noclr.s_color == 0.0);
    const auto nostrc = score_pair(q, c, FeatureMask::no_structure());
    CHECK_THAT(nostrc.s_screenshot, WithinAbs(1.0, 1e-12));
    CHECK_THAT(score_pair(q, c, FeatureMask::no_tfidf()).s_textual, WithinAbs(0.5, 1e-12));
    CHECK_THAT(score_pair(q, c, FeatureMask::no_embedding()).s_textual, WithinAbs(0.5, 1e-12));

    CHECK(FeatureMask::parse("NoClr") == FeatureMask::no_color());
    CHECK(FeatureMask::parse("full").name() == "full");
    CHECK_THROWS_AS(FeatureMask::parse("nothing"), ConfigError);
}

TEST_CASE("negative embedding cosine counts as zero", "[similarity]") {
    FeatureBundle a, b;
    a.embedding = {1.0, 0.0};
    b.embedding = {-1.0, 0.2};
    CHECK(score_pair(a, b).s_embedding == 0.0);
}

TEST_CASE("score_pair matches independent arithmetic", "[similarity][property]") {
    std::mt19937 rng(9);
    const FeatureMask masks[] = {FeatureMask::full(), FeatureMask::no_tfidf(), FeatureMask::no_embedding(),
                                 FeatureMask::no_color(), FeatureMask::no_structure()};
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_bundle(rng), b = random_bundle(rng);
        const double st = oracle::cosine(as_vec(a.structure.values), as_vec(b.structure.values));
        const double cl = oracle::cosine(as_vec(a.color.values), as_vec(b.color.values));
        const double tf = oracle::cosine(dense(a.tfidf, 30), dense(b.tfidf, 30));
        const double em = std::max(0.0, oracle::cosine(a.embedding, b.embedding));
        for (const auto& m : masks) {
            const auto s = score_pair(a, b, m);
            std::vector<double> scr, txt;
            if (m.use_structure) scr.push_back(st);
            if (m.use_color) scr.push_back(cl);
            if (m.use_tfidf) txt.push_back(tf);
            if (m.use_embedding) txt.push_back(em);
            const double e_scr = std::accumulate(scr.begin(), scr.end(), 0.0) / scr.size();
            const double e_txt = std::accumulate(txt.begin(), txt.end(), 0.0) / txt.size();
            CHECK_THAT(s.s_screenshot, WithinAbs(e_scr, 1e-12));
            CHECK_THAT(s.s_textual, WithinAbs(e_txt, 1e-12));
            CHECK(s.s_total == (s.s_screenshot + s.s_textual) / 2.0);
            for (double v : {s.s_structure, s.s_color, s.s_tfidf, s.s_embedding, s.s_screenshot, s.s_textual, s.s_total}) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
            CHECK(score_pair(b, a, m) == s);
        }
    }
}

TEST_CASE("s_total does not decrease when a feature cosine rises", "[similarity][property]") {
    double prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
        const double c = i / 20.0;
        const auto s = score_pair(fixtures::unit_bundle(1.0, 1.0), fixtures::unit_bundle(c, 0.3));
        CHECK(s.s_total >= prev - 1e-15);
        prev = s.s_total;
    }
}
