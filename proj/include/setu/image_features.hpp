// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "setu/image.hpp"

namespace setu {

// Structure descriptor geometry: 4x4 spatial cells, 8 orientation bins.
inline constexpr std::size_t kStructureGrid = 4;
inline constexpr std::size_t kOrientationBins = 8;
inline constexpr std::size_t kStructureDim = kStructureGrid * kStructureGrid * kOrientationBins;  // 128

// Color descriptor geometry: 3x3 spatial cells, 5 achromatic + 16 hue bins.
inline constexpr std::size_t kColorGrid = 3;
inline constexpr std::size_t kAchromaticBins = 5;
inline constexpr std::size_t kHueBins = 16;
inline constexpr std::size_t kColorCellBins = kAchromaticBins + kHueBins;            // 21
inline constexpr std::size_t kColorDim = kColorGrid * kColorGrid * kColorCellBins;  // 189


inline constexpr std::size_t kBlankImageSide = 256;

/// Bumped whenever descriptor geometry or binning rules change.
inline constexpr const char* kDescriptorVersion = "grad4x4x8-hsv3x3x21-v1";

/// Gradient-orientation layout descriptor. Either all-zero or unit L2 norm.
struct StructureVector {
    std::array<double, kStructureDim> values{};

    [[nodiscard]] bool is_zero() const {
        return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
    }
    friend bool operator==(const StructureVector&, const StructureVector&) = default;
};

/// Per-cell HSV histograms; every non-empty cell block sums to 1.
struct ColorVector {
    std::array<double, kColorDim> values{};

    friend bool operator==(const ColorVector&, const ColorVector&) = default;
};

struct ScreenshotDescriptors {
    StructureVector structure;
    ColorVector color;

    friend bool operator==(const ScreenshotDescriptors&, const ScreenshotDescriptors&) = default;
};

/// Luma scaled by 1000 (299R + 587G + 114B). Integer-valued, so gradient
/// components compare exactly; the scale cancels in normalization.
[[nodiscard]] inline double luma(const Rgb& p) noexcept {
    return 299.0 * p.r + 587.0 * p.g + 114.0 * p.b;
}

/// Orientation bin of a gradient, angles folded into [0, pi). Directions at
/// exact multiples of pi/4 fall into the bin they open.
[[nodiscard]] inline std::size_t orientation_bin(double gx, double gy) noexcept {
    if (gy == 0.0) return 0;
    if (gx == 0.0) return kOrientationBins / 2;
    if (gx == gy) return kOrientationBins / 4;
    if (gx == -gy) return 3 * kOrientationBins / 4;
    double angle = std::atan2(gy, gx);
    if (angle < 0.0) {
        angle += std::numbers::pi;
    }
    if (angle >= std::numbers::pi) {
        angle -= std::numbers::pi;
    }
    const auto bin = static_cast<std::size_t>(angle / (std::numbers::pi / kOrientationBins));
    return std::min(bin, kOrientationBins - 1);
}

[[nodiscard]] inline StructureVector structure_descriptor(const RasterImage& image) {
    const std::size_t w = image.width();
    const std::size_t h = image.height();
    std::vector<double> lum(w * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            lum[y * w + x] = luma(image.at(x, y));
        }
    }

    StructureVector out;
    for (std::size_t y = 0; y < h; ++y) {
        const std::size_t y0 = y == 0 ? 0 : y - 1;
        const std::size_t y1 = std::min(y + 1, h - 1);
        const std::size_t cell_y = y * kStructureGrid / h;
        for (std::size_t x = 0; x < w; ++x) {
            const std::size_t x0 = x == 0 ? 0 : x - 1;
            const std::size_t x1 = std::min(x + 1, w - 1);
            const double gx = (lum[y * w + x1] - lum[y * w + x0]) / 2.0;
            const double gy = (lum[y1 * w + x] - lum[y0 * w + x]) / 2.0;
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) {
                continue;
            }
            const std::size_t cell_x = x * kStructureGrid / w;
            const std::size_t cell = cell_y * kStructureGrid + cell_x;
            out.values[cell * kOrientationBins + orientation_bin(gx, gy)] += mag;
        }
    }

    double norm2 = 0.0;
    for (double v : out.values) {
        norm2 += v * v;
    }
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : out.values) {
            v *= inv;
        }
    }
    return out;
}

/// Index within a 21-bin cell histogram for one pixel. Thresholds and bin
/// edges are evaluated in integer arithmetic so boundary pixels land
/// deterministically.
[[nodiscard]] inline std::size_t color_bin(const Rgb& p) noexcept {
    const int mx = std::max({p.r, p.g, p.b});
    const int mn = std::min({p.r, p.g, p.b});
    const int delta = mx - mn;
    // saturation < 0.1 or value < 0.1
    if (10 * delta < mx || 10 * mx < 255) {
        return std::min<std::size_t>(kAchromaticBins - 1, static_cast<std::size_t>(mx * kAchromaticBins / 255));
    }
    // hue as a fraction of 360 degrees: (sector * delta + offset) / (6 * delta)
    int num = 0;
    if (mx == p.r) {
        num = p.g - p.b;
        if (num < 0) {
            num += 6 * delta;
        }
    } else if (mx == p.g) {
        num = 2 * delta + (p.b - p.r);
    } else {
        num = 4 * delta + (p.r - p.g);
    }
    const auto hbin = static_cast<std::size_t>(num) * kHueBins / static_cast<std::size_t>(6 * delta);
    return kAchromaticBins + std::min<std::size_t>(kHueBins - 1, hbin);
}

[[nodiscard]] inline ColorVector color_descriptor(const RasterImage& image) {
    const std::size_t w = image.width();
    const std::size_t h = image.height();
    std::array<std::size_t, kColorGrid * kColorGrid> counts{};
    ColorVector out;
    for (std::size_t y = 0; y < h; ++y) {
        const std::size_t cell_y = y * kColorGrid / h;
        for (std::size_t x = 0; x < w; ++x) {
            const std::size_t cell = cell_y * kColorGrid + x * kColorGrid / w;
            out.values[cell * kColorCellBins + color_bin(image.at(x, y))] += 1.0;
            ++counts[cell];
        }
    }
    for (std::size_t cell = 0; cell < counts.size(); ++cell) {
        if (counts[cell] == 0) {
            continue;
        }
        const double n = static_cast<double>(counts[cell]);
        for (std::size_t b = 0; b < kColorCellBins; ++b) {
            out.values[cell * kColorCellBins + b] /= n;
        }
    }
    return out;
}

[[nodiscard]] inline ScreenshotDescriptors describe_screenshot(const RasterImage& image) {
    return {structure_descriptor(image), color_descriptor(image)};
}

/// Descriptors of the default screenshot (all-white 256x256) used for
/// reports without one.
[[nodiscard]] inline const ScreenshotDescriptors& blank_descriptor() {
    static const ScreenshotDescriptors blank =
        describe_screenshot(RasterImage(kBlankImageSide, kBlankImageSide, Rgb{255, 255, 255}));
    return blank;
}

}  // namespace setu
