#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "setu/error.hpp"
#include "setu/image.hpp"
#include "support/fixtures.hpp"

using namespace setu;

namespace {

std::filesystem::path data(const char* name) { return std::filesystem::path(SETU_TEST_DATA) / name; }

}  // namespace

TEST_CASE("1x1 white PNG decodes to one white pixel", "[image]") {
    const RasterImage img = load_image(data("white_1x1.png"));
    CHECK(img == RasterImage(1, 1, Rgb{255, 255, 255}));
}

TEST_CASE("alpha is composited over white", "[image]") {
    const RasterImage img = load_image(data("alpha_2x1.png"));
    REQUIRE(img.width() == 2);
    CHECK(img.at(0, 0) == Rgb{255, 255, 255});
    CHECK(img.at(1, 0) == Rgb{127, 127, 255});
}

TEST_CASE("grayscale and palette PNGs expand to RGB", "[image]") {
    const RasterImage gray = load_image(data("gray_3x2.png"));
    REQUIRE(gray.width() == 3);
    REQUIRE(gray.height() == 2);
    const std::uint8_t expect[] = {0, 50, 100, 150, 200, 255};
    for (std::size_t i = 0; i < 6; ++i) {
        const Rgb p = gray.at(i % 3, i / 3);
        CHECK(p == Rgb{expect[i], expect[i], expect[i]});
    }
    const RasterImage pal = load_image(data("palette_2x2.png"));
    CHECK(pal.at(0, 0) == Rgb{255, 0, 0});
    CHECK(pal.at(1, 0) == Rgb{0, 255, 0});
    CHECK(pal.at(0, 1) == Rgb{0, 0, 255});
}

TEST_CASE("JPEG decodes to 8-bit RGB", "[image]") {
    const RasterImage solid = load_image(data("solid_16.jpg"));
    REQUIRE(solid.width() == 16);
    for (const Rgb& p : solid.pixels()) {
        CHECK(std::abs(p.r - 200) <= 2);
        CHECK(std::abs(p.g - 40) <= 2);
        CHECK(std::abs(p.b - 90) <= 2);
    }
    const RasterImage gray = load_image(data("gray_8.jpg"));
    for (const Rgb& p : gray.pixels()) {
        CHECK(p.r == p.g);
        CHECK(p.g == p.b);
        CHECK(std::abs(p.r - 128) <= 1);
    }
}

TEST_CASE("corrupt or unknown streams raise decode errors", "[image]") {
    const std::vector<std::uint8_t> junk = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK_THROWS_AS(decode_image(junk), DecodeError);
    CHECK_THROWS_AS(decode_image(std::vector<std::uint8_t>{}), DecodeError);
    CHECK_THROWS_AS(load_image(data("truncated.png")), DecodeError);

    std::vector<std::uint8_t> bad_jpeg = {0xFF, 0xD8, 0xFF, 0xE0, 0, 0x10, 'J', 'F', 'I', 'F', 0, 1};
    CHECK_THROWS_AS(decode_image(bad_jpeg), DecodeError);

    auto png = encode_png(RasterImage(4, 4, Rgb{1, 2, 3}));
    png.resize(png.size() - 20);
    CHECK_THROWS_AS(decode_image(png), DecodeError);
}

TEST_CASE("missing file raises an I/O error", "[image]") {
    CHECK_THROWS_AS(load_image(data("does_not_exist.png")), IoError);
}

TEST_CASE("encode then decode returns the input raster", "[image]") {
    std::mt19937 rng(7);
    std::vector<Rgb> px(16);
    for (auto& p : px) {
        p = {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng())};
    }
    const RasterImage img(4, 4, px);
    CHECK(decode_image(encode_png(img)) == img);

    const auto dir = fixtures::scratch_dir("image_roundtrip");
    save_png(img, dir / "nested" / "x.png");
    CHECK(load_image(dir / "nested" / "x.png") == img);
}

TEST_CASE("raster invariants", "[image]") {
    CHECK_THROWS_AS(RasterImage(0, 3), ConfigError);
    CHECK_THROWS_AS(RasterImage(3, 0), ConfigError);
    CHECK_THROWS_AS(RasterImage(2, 2, std::vector<Rgb>(3)), ConfigError);
    const RasterImage img(3, 2, Rgb{9, 8, 7});
    CHECK(img.pixels().size() == 6);
    CHECK(img.at(2, 1) == Rgb{9, 8, 7});
}
