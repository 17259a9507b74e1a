// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include "splat/projected.hpp"

#include <cmath>

#include "splat/kernels.hpp"

namespace splat {

PixelBox gaussian_pixel_box(const ProjectedGaussian& g) {
    const int cx = static_cast<int>(std::floor(g.mean2d.x));
    const int cy = static_cast<int>(std::floor(g.mean2d.y));
    return {cx - g.radius, cy - g.radius, cx + g.radius, cy + g.radius};
}

PixelBox screen_box(int width, int height) { return {0, 0, width - 1, height - 1}; }

std::optional<ProjectedGaussian> project_gaussian(const Gaussian3D& g, int src, const Camera& cam,
                                                  RadiusLaw law, float dilation,
                                                  const PixelBox& target) {
    const Vec3f mu_cam = view_transform(g.position, cam);
    const Vec2f mean2d = project_to_screen(mu_cam, cam);
    const Mat3f cov3d = build_covariance3d(g.scale, g.rotation);
    const Mat23f J = jacobian(mu_cam, cam);
    const SymMat2 cov2d = project_covariance(cov3d, cam.rot, J, dilation);
    const auto inv = invert_2x2(cov2d);
    if (!inv) return std::nullopt;  // singular footprint, cull

    const auto [l1, l2] = eigenvalues_2x2(cov2d);
    const int radius = law == RadiusLaw::ThreeSigma ? radius_three_sigma(l1)
                                                    : radius_opacity_aware(l1, g.opacity);
    if (radius <= 0) return std::nullopt;

    ProjectedGaussian out;
    out.mean2d = mean2d;
    out.depth = mu_cam.z;
    out.inv_cov = *inv;
    out.radius = radius;
    out.log_opacity = g.log_opacity;
    out.opacity = g.opacity;
    out.src = src;
    if (intersect(gaussian_pixel_box(out), target).empty()) return std::nullopt;
    return out;
}

}  // namespace splat
