// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "splat/geometry.hpp"

namespace splat {

struct OutputImage {
    int width = 0;
    int height = 0;
    std::vector<Vec3f> rgb;  // row-major, values in [0, 1]

    Vec3f& at(int x, int y) { return rgb[static_cast<size_t>(y) * width + x]; }
    const Vec3f& at(int x, int y) const { return rgb[static_cast<size_t>(y) * width + x]; }
};

OutputImage make_image(int width, int height, const Vec3f& fill = {0, 0, 0});

/// Channel quantization is round(v*255) after clamping to [0, 1].
unsigned char quantize_channel(float v);

/// Writes a binary PPM (P6, maxval 255). A ".png" extension selects PNG output
/// instead. The PPM encoding is bit-deterministic for a fixed image.
void write_image(const OutputImage& img, const std::string& path);

}  // namespace splat
