// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <utility>

#include "splat/camera.hpp"
#include "splat/config.hpp"
#include "splat/gaussian.hpp"
#include "splat/geometry.hpp"

namespace splat {

/// Camera-space position; .z is the depth used for grouping and sorting.
Vec3f view_transform(const Vec3f& mu, const Camera& cam);

/// (fx*x/z + cx, fy*y/z + cy). Throws std::domain_error when z <= 0; callers
/// must have culled such points.
Vec2f project_to_screen(const Vec3f& mu_cam, const Camera& cam);

/// Sigma = R S S^T R^T for a unit quaternion (scalar first) and positive scales.
Mat3f build_covariance3d(const Vec3f& scale, const Vec4f& q);

/// Affine approximation of the perspective projection at mu_cam.
/// Throws std::domain_error when z <= 0.
Mat23f jacobian(const Vec3f& mu_cam, const Camera& cam);

/// J W Sigma W^T J^T with `dilation` added to both diagonal entries.
SymMat2 project_covariance(const Mat3f& cov3d, const Mat3f& view_rot, const Mat23f& J,
                           float dilation);

/// Eigenvalues (lambda1, lambda2) with lambda1 >= lambda2.
std::pair<float, float> eigenvalues_2x2(const SymMat2& m);

/// Unit eigenvector for the given eigenvalue of a symmetric 2x2 matrix.
Vec2f eigenvector_2x2(const SymMat2& m, float lambda);

/// Exact symmetric inverse, or nullopt when det <= 1e-12 (callers cull).
std::optional<SymMat2> invert_2x2(const SymMat2& m);

/// ceil(3*sqrt(lambda_max)) in pixels.
int radius_three_sigma(float lambda_max);

/// ceil(sqrt(2*ln(255*opacity)*lambda_max)); 0 when 255*opacity <= 1, meaning
/// the splat cannot reach the minimum displayable alpha anywhere.
int radius_opacity_aware(float lambda_max, float opacity);

/// Degree-3 real spherical harmonics color for a unit direction, with the
/// conventional +0.5 channel offset and a clamp at 0.
Vec3f eval_sh(const std::array<float, kShCoeffs>& sh, const Vec3f& dir);

/// Piecewise-linear approximation of exp(x) on [-5.54, 0): 16 uniform segments,
/// each fit so the relative error stays below 1%. Inputs at or below -5.54
/// yield 0 and inputs at or above 0 yield 1.
class ExpLut {
  public:
    static constexpr float kMinInput = -5.54f;
    static constexpr int kSegments = 16;

    ExpLut();
    float operator()(float x) const;

  private:
    std::array<float, kSegments> slope_{};
    std::array<float, kSegments> intercept_{};
};

const ExpLut& shared_exp_lut();

/// Evaluates exp(x) exactly or through the shared lookup table.
float exp_by_mode(float x, ExpMode mode);

struct ProjectedGaussian;

/// Alpha contribution of a projected splat at integer pixel (px, py); the
/// sample point is the pixel center (px + 0.5, py + 0.5).
/// alpha = min(0.99, exp(log_opacity - 0.5 * d^T InvCov d)).
float alpha_at_pixel(int px, int py, const ProjectedGaussian& g, ExpMode mode);

inline constexpr float kAlphaCeiling = 0.99f;

/// Front-to-back compositing step: accum += T * alpha * color; T *= (1 - alpha).
void blend_step(float& transmittance, Vec3f& accum, float alpha, const Vec3f& color);

/// Minimum of (p - mu)^T A (p - mu) over the continuous rectangle
/// [x0, x1] x [y0, y1], together with its argmin. A must be positive-definite.
struct QuadMin {
    float value = 0.0f;
    Vec2f at{};
};
QuadMin min_quadform_over_rect(const SymMat2& A, const Vec2f& mu, float x0, float x1, float y0,
                               float y1);

}  // namespace splat
