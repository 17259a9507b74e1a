// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "splat/camera.hpp"
#include "splat/config.hpp"
#include "splat/gaussian.hpp"
#include "splat/geometry.hpp"

namespace splat {

/// Screen-space state of one splat after projection. `radius` follows the
/// radius law that was active at projection time.
struct ProjectedGaussian {
    Vec2f mean2d{};
    float depth = 0.0f;   // camera-space z, > 0 for anything retained
    SymMat2 inv_cov{};    // inverse 2D covariance, positive-definite
    int radius = 0;
    Vec3f color{};        // unset until shading
    float log_opacity = 0.0f;
    float opacity = 0.0f;
    int src = -1;         // index into the source model
};

/// The axis-aligned pixel square of half-width `radius` around the splat's
/// center pixel. Both pipelines restrict all per-pixel work to this box.
PixelBox gaussian_pixel_box(const ProjectedGaussian& g);

PixelBox screen_box(int width, int height);

/// Projects one gaussian against a target pixel rectangle. Returns nullopt when
/// the 2D covariance is singular, the radius law yields zero, or the pixel box
/// misses the rectangle entirely. Depth culling is the caller's job.
std::optional<ProjectedGaussian> project_gaussian(const Gaussian3D& g, int src, const Camera& cam,
                                                  RadiusLaw law, float dilation,
                                                  const PixelBox& target);

/// Ascending (depth, source index) — the one total order both pipelines share.
inline bool depth_order(const ProjectedGaussian& a, const ProjectedGaussian& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.src < b.src;
}

}  // namespace splat
