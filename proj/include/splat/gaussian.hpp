// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "splat/geometry.hpp"

namespace splat {

inline constexpr int kShCoeffsPerChannel = 16;  // degree-3 real spherical harmonics
inline constexpr int kShCoeffs = 48;
inline constexpr int kGaussianScalars = 59;  // 3 pos + 48 sh + 1 opacity + 3 scale + 4 rot

/// One trained splat after load-time activations. The spherical harmonics
/// coefficients are stored 16 per channel: sh[16*ch] is the channel's DC term.
struct Gaussian3D {
    Vec3f position{};
    std::array<float, kShCoeffs> sh{};
    float opacity = 0.0f;      // in (0, 1)
    float log_opacity = 0.0f;  // ln(opacity), precomputed
    Vec3f scale{};             // strictly positive
    Vec4f rotation{1, 0, 0, 0};  // unit quaternion, scalar first
};

struct GaussianModel {
    std::vector<Gaussian3D> gaussians;
    std::string source_path;

    int count() const { return static_cast<int>(gaussians.size()); }
};

}  // namespace splat
