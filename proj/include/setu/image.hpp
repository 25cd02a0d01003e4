// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <algorithm>
#include <csetjmp>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <png.h>
#include <jpeglib.h>

#include "setu/detail/io.hpp"
#include "setu/error.hpp"

namespace setu {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit RGB raster.
class RasterImage {
public:
    RasterImage() = default;

    RasterImage(std::size_t width, std::size_t height, Rgb fill = {255, 255, 255})
        : width_(width), height_(height), pixels_(width * height, fill) {
        if (width == 0 || height == 0) {
            throw ConfigError("raster dimensions must be at least 1x1");
        }
    }

    RasterImage(std::size_t width, std::size_t height, std::vector<Rgb> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        if (width == 0 || height == 0) {
            throw ConfigError("raster dimensions must be at least 1x1");
        }
        if (pixels_.size() != width * height) {
            throw ConfigError("pixel count does not match raster dimensions");
        }
    }

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t height() const noexcept { return height_; }
    [[nodiscard]] bool empty() const noexcept { return pixels_.empty(); }

    [[nodiscard]] const Rgb& at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
    [[nodiscard]] Rgb& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }

    [[nodiscard]] std::span<const Rgb> pixels() const noexcept { return pixels_; }
    [[nodiscard]] std::span<Rgb> pixels() noexcept { return pixels_; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<Rgb> pixels_;
};

namespace detail {

inline bool looks_like_png(std::span<const std::uint8_t> bytes) {
    static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    return bytes.size() >= 8 && std::equal(std::begin(sig), std::end(sig), bytes.begin());
}

inline bool looks_like_jpeg(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

inline std::uint8_t over_white(std::uint8_t c, std::uint8_t a) {
    const unsigned v = static_cast<unsigned>(c) * a + 255u * (255u - a);
    return static_cast<std::uint8_t>((v + 127u) / 255u);
}

inline RasterImage decode_png(std::span<const std::uint8_t> bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()) == 0) {
        std::string msg = image.message;
        png_image_free(&image);
        throw DecodeError("png: " + msg);
    }
    image.format = PNG_FORMAT_RGBA;
    if (image.width == 0 || image.height == 0) {
        png_image_free(&image);
        throw DecodeError("png: empty image");
    }
    std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
    if (png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr) == 0) {
        std::string msg = image.message;
        png_image_free(&image);
        throw DecodeError("png: " + msg);
    }
    std::vector<Rgb> px(static_cast<std::size_t>(image.width) * image.height);
    for (std::size_t i = 0; i < px.size(); ++i) {
        const std::uint8_t a = rgba[4 * i + 3];
        px[i] = {over_white(rgba[4 * i], a), over_white(rgba[4 * i + 1], a), over_white(rgba[4 * i + 2], a)};
    }
    return RasterImage(image.width, image.height, std::move(px));
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

extern "C" inline void setu_jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

extern "C" inline void setu_jpeg_silence(j_common_ptr, int) {}

// Kept free of objects with non-trivial destructors between setjmp and
// longjmp; the raster is assembled by the caller.
inline bool decode_jpeg_raw(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& rgb,
                            unsigned& width, unsigned& height, char* message) {
    jpeg_decompress_struct cinfo;
    JpegErrorManager err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = setu_jpeg_error_exit;
    err.base.emit_message = setu_jpeg_silence;
    err.message[0] = '\0';
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        std::snprintf(message, JMSG_LENGTH_MAX, "%s", err.message);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    width = cinfo.output_width;
    height = cinfo.output_height;
    rgb.resize(static_cast<std::size_t>(width) * height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

inline RasterImage decode_jpeg(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint8_t> rgb;
    unsigned width = 0;
    unsigned height = 0;
    char message[JMSG_LENGTH_MAX] = {};
    if (!decode_jpeg_raw(bytes, rgb, width, height, message)) {
        throw DecodeError(std::string("jpeg: ") + message);
    }
    if (width == 0 || height == 0) {
        throw DecodeError("jpeg: empty image");
    }
    std::vector<Rgb> px(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = {rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]};
    }
    return RasterImage(width, height, std::move(px));
}

}  // namespace detail

/// Decodes a PNG or JPEG stream to 8-bit RGB; alpha is composited over white.
inline RasterImage decode_image(std::span<const std::uint8_t> bytes) {
    if (detail::looks_like_png(bytes)) {
        return detail::decode_png(bytes);
    }
    if (detail::looks_like_jpeg(bytes)) {
        return detail::decode_jpeg(bytes);
    }
    throw DecodeError("unsupported image format (expected PNG or JPEG)");
}

inline RasterImage load_image(const std::filesystem::path& path) {
    const auto bytes = detail::read_binary_file(path);
    try {
        return decode_image(bytes);
    } catch (const DecodeError& e) {
        throw DecodeError(path.string() + ": " + e.what());
    }
}

/// Encodes a raster as an 8-bit RGB PNG.
inline std::vector<std::uint8_t> encode_png(const RasterImage& raster) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(raster.width());
    image.height = static_cast<png_uint_32>(raster.height());
    image.format = PNG_FORMAT_RGB;

    std::vector<std::uint8_t> rgb;
    rgb.reserve(raster.pixels().size() * 3);
    for (const Rgb& p : raster.pixels()) {
        rgb.push_back(p.r);
        rgb.push_back(p.g);
        rgb.push_back(p.b);
    }
    png_alloc_size_t size = 0;
    if (png_image_write_to_memory(&image, nullptr, &size, 0, rgb.data(), 0, nullptr) == 0) {
        throw Error(std::string("png encode: ") + image.message);
    }
    std::vector<std::uint8_t> out(size);
    if (png_image_write_to_memory(&image, out.data(), &size, 0, rgb.data(), 0, nullptr) == 0) {
        throw Error(std::string("png encode: ") + image.message);
    }
    out.resize(size);
    return out;
}

inline void save_png(const RasterImage& raster, const std::filesystem::path& path) {
    const auto bytes = encode_png(raster);
    detail::write_binary_file(path, bytes.data(), bytes.size());
}

}  // namespace setu
