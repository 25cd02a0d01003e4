#include <numeric>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "setu/image_features.hpp"
#include "setu/similarity.hpp"
#include "setu/synthgen.hpp"
#include "support/oracles.hpp"

using namespace setu;
using Catch::Matchers::WithinAbs;

namespace {

RasterImage random_image(std::mt19937& rng, std::size_t w, std::size_t h, int lo = 0, int hi = 255) {
    std::uniform_int_distribution<int> d(lo, hi);
    std::vector<Rgb> px(w * h);
    for (auto& p : px) {
        p = {static_cast<std::uint8_t>(d(rng)), static_cast<std::uint8_t>(d(rng)), static_cast<std::uint8_t>(d(rng))};
    }
    return RasterImage(w, h, std::move(px));
}

double norm(const StructureVector& v) {
    return std::sqrt(std::inner_product(v.values.begin(), v.values.end(), v.values.begin(), 0.0));
}

}  // namespace

TEST_CASE("uniform images have an all-zero structure vector", "[image_features]") {
    for (const Rgb c : {Rgb{0, 0, 0}, Rgb{255, 255, 255}, Rgb{12, 200, 77}}) {
        for (const auto [w, h] : {std::pair{1, 1}, std::pair{3, 7}, std::pair{64, 40}}) {
            CHECK(structure_descriptor(RasterImage(w, h, c)).is_zero());
        }
    }
}

TEST_CASE("vertical stripes put all energy in the horizontal-gradient bin", "[image_features]") {
    RasterImage img(32, 32);
    for (std::size_t y = 0; y < 32; ++y)
        for (std::size_t x = 0; x < 32; ++x) img.at(x, y) = (x / 2) % 2 ? Rgb{0, 0, 0} : Rgb{255, 255, 255};
    const auto v = structure_descriptor(img);
    const auto expected = oracle::structure(img);
    for (std::size_t i = 0; i < kStructureDim; ++i) {
        CHECK_THAT(v.values[i], WithinAbs(expected[i], 1e-12));
        if (i % kOrientationBins != 0) CHECK(v.values[i] == 0.0);
    }
    for (std::size_t cell = 0; cell < 16; ++cell) CHECK(v.values[cell * kOrientationBins] > 0.0);
    CHECK_THAT(norm(v), WithinAbs(1.0, 1e-12));
}

TEST_CASE("structure descriptor matches pixel-level accumulation", "[image_features]") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t w = 1 + rng() % 40, h = 1 + rng() % 40;
        const RasterImage img = random_image(rng, w, h, 0, trial % 2 ? 3 : 255);
        const auto v = structure_descriptor(img);
        const auto expected = oracle::structure(img);
        for (std::size_t i = 0; i < kStructureDim; ++i) REQUIRE_THAT(v.values[i], WithinAbs(expected[i], 1e-12));
    }
}

TEST_CASE("orientation bins", "[image_features]") {
    CHECK(orientation_bin(1, 0) == 0);
    CHECK(orientation_bin(-1, 0) == 0);
    CHECK(orientation_bin(0, 1) == 4);
    CHECK(orientation_bin(0, -1) == 4);
    CHECK(orientation_bin(1, 1) == 2);
    CHECK(orientation_bin(-1, -1) == 2);
    CHECK(orientation_bin(-1, 1) == 6);
    CHECK(orientation_bin(1, -1) == 6);
    CHECK(orientation_bin(1, 0.1) == 0);
    CHECK(orientation_bin(1, -0.1) == 7);
}

TEST_CASE("structure descriptor ignores a constant luma offset", "[image_features][property]") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const RasterImage img = random_image(rng, 24, 18, 20, 200);
        RasterImage shifted = img;
        const std::uint8_t c = static_cast<std::uint8_t>(1 + rng() % 40);
        for (Rgb& p : shifted.pixels()) p = {static_cast<std::uint8_t>(p.r + c), static_cast<std::uint8_t>(p.g + c),
                                             static_cast<std::uint8_t>(p.b + c)};
        const auto a = structure_descriptor(img), b = structure_descriptor(shifted);
        for (std::size_t i = 0; i < kStructureDim; ++i) CHECK_THAT(a.values[i], WithinAbs(b.values[i], 1e-9));
    }
}

TEST_CASE("descriptors are deterministic", "[image_features]") {
    std::mt19937 rng(3);
    const RasterImage img = random_image(rng, 50, 30);
    CHECK(describe_screenshot(img) == describe_screenshot(RasterImage(img)));
}

TEST_CASE("all-white image fills the brightest achromatic bin of every cell", "[image_features]") {
    const auto v = color_descriptor(RasterImage(10, 10, Rgb{255, 255, 255}));
    for (std::size_t cell = 0; cell < 9; ++cell) {
        for (std::size_t b = 0; b < kColorCellBins; ++b) {
            CHECK(v.values[cell * kColorCellBins + b] == (b == kAchromaticBins - 1 ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("red and blue halves match direct pixel counting", "[image_features]") {
    RasterImage img(30, 12);
    for (std::size_t y = 0; y < 12; ++y)
        for (std::size_t x = 0; x < 30; ++x) img.at(x, y) = x < 15 ? Rgb{255, 0, 0} : Rgb{0, 0, 255};
    const auto v = color_descriptor(img);
    const auto expected = oracle::color(img);
    for (std::size_t i = 0; i < kColorDim; ++i) CHECK_THAT(v.values[i], WithinAbs(expected[i], 1e-15));
    // left column all red, right column all blue, middle column split 5/10 red
    const std::size_t red = kAchromaticBins + 0;
    const std::size_t blue = kAchromaticBins + 10;  // hue 240 deg
    CHECK(v.values[0 * kColorCellBins + red] == 1.0);
    CHECK(v.values[2 * kColorCellBins + blue] == 1.0);
    CHECK_THAT(v.values[1 * kColorCellBins + red], WithinAbs(0.5, 1e-15));
    CHECK_THAT(v.values[1 * kColorCellBins + blue], WithinAbs(0.5, 1e-15));
}

TEST_CASE("color bins", "[image_features]") {
    CHECK(color_bin({0, 0, 0}) == 0);
    CHECK(color_bin({255, 255, 255}) == 4);
    CHECK(color_bin({128, 128, 128}) == 2);
    CHECK(color_bin({20, 0, 0}) == 0);          // value below 0.1
    CHECK(color_bin({255, 240, 240}) == 4);     // saturation below 0.1
    CHECK(color_bin({255, 0, 0}) == 5);
    CHECK(color_bin({0, 255, 0}) == 5 + 5);     // 120 deg
    CHECK(color_bin({255, 0, 255}) == 5 + 13);  // 300 deg
    CHECK(color_bin({255, 0, 1}) == 5 + 15);    // just below 360 deg
}

TEST_CASE("color descriptor matches direct pixel counting", "[image_features]") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t w = 1 + rng() % 40, h = 1 + rng() % 40;
        const RasterImage img = random_image(rng, w, h);
        const auto v = color_descriptor(img);
        const auto expected = oracle::color(img);
        for (std::size_t i = 0; i < kColorDim; ++i) REQUIRE_THAT(v.values[i], WithinAbs(expected[i], 1e-12));
    }
}

TEST_CASE("non-empty color cells sum to one", "[image_features][property]") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t w = 1 + rng() % 30, h = 1 + rng() % 30;
        const auto v = color_descriptor(random_image(rng, w, h));
        for (std::size_t cell = 0; cell < 9; ++cell) {
            const std::size_t cx = cell % 3, cy = cell / 3;
            // a cell is empty when no column or no row maps into it
            bool has_col = false, has_row = false;
            for (std::size_t x = 0; x < w; ++x) has_col |= x * 3 / w == cx;
            for (std::size_t y = 0; y < h; ++y) has_row |= y * 3 / h == cy;
            double sum = 0.0;
            for (std::size_t b = 0; b < kColorCellBins; ++b) {
                const double x = v.values[cell * kColorCellBins + b];
                CHECK(x >= 0.0);
                CHECK(x <= 1.0);
                sum += x;
            }
            CHECK_THAT(sum, WithinAbs(has_col && has_row ? 1.0 : 0.0, 1e-9));
        }
    }
}

TEST_CASE("two noisy renders of one layout have near-identical descriptors", "[image_features]") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        synth::Rng layout_rng(100 + trial);
        const synth::Layout layout = synth::random_layout(layout_rng);
        const auto a = describe_screenshot(synth::render_layout(layout, 96, 160, 2 * trial + 1, 1));
        const auto b = describe_screenshot(synth::render_layout(layout, 96, 160, 2 * trial + 2, 1));
        CHECK(cosine(a.structure.values, b.structure.values) >= 0.99);
        CHECK(cosine(a.color.values, b.color.values) >= 0.99);
    }
}

TEST_CASE("per-pixel noise of one level barely moves the color descriptor", "[image_features]") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        synth::Rng layout_rng(200 + trial);
        const RasterImage clean = synth::render_layout(synth::random_layout(layout_rng), 96, 160);
        RasterImage noisy = clean;
        for (Rgb& p : noisy.pixels()) {
            const auto j = [&](std::uint8_t c) {
                return static_cast<std::uint8_t>(std::clamp(static_cast<int>(c) + static_cast<int>(rng() % 3) - 1, 0, 255));
            };
            p = {j(p.r), j(p.g), j(p.b)};
        }
        CHECK(cosine(color_descriptor(clean).values, color_descriptor(noisy).values) >= 0.99);
    }
}

TEST_CASE("blank descriptor", "[image_features]") {
    const auto& blank = blank_descriptor();
    CHECK(blank.structure.is_zero());
    for (std::size_t cell = 0; cell < 9; ++cell) {
        CHECK(blank.color.values[cell * kColorCellBins + kAchromaticBins - 1] == 1.0);
    }
    const RasterImage white(kBlankImageSide, kBlankImageSide, Rgb{255, 255, 255});
    CHECK(blank.structure == structure_descriptor(white));
    CHECK(blank.color == color_descriptor(white));
}
