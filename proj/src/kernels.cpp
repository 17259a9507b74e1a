// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include "splat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "splat/projected.hpp"

namespace splat {

namespace {

// Real spherical harmonics basis constants, degree 0..3, graphics convention.
constexpr float kSh0 = 0.28209479177387814f;
constexpr float kSh1 = 0.4886025119029199f;
constexpr float kSh2[5] = {1.0925484305920792f, -1.0925484305920792f, 0.31539156525252005f,
                           -1.0925484305920792f, 0.5462742152960396f};
constexpr float kSh3[7] = {-0.5900435899266435f, 2.890611442640554f,  -0.4570457994644658f,
                           0.3731763325901154f,  -0.4570457994644658f, 1.445305721320277f,
                           -0.5900435899266435f};

}  // namespace

Vec3f view_transform(const Vec3f& mu, const Camera& cam) {
    return cam.rot * mu + cam.trans;
}

Vec2f project_to_screen(const Vec3f& mu_cam, const Camera& cam) {
    if (mu_cam.z <= 0.0f) throw std::domain_error("project_to_screen: depth must be positive");
    return {cam.fx * mu_cam.x / mu_cam.z + cam.cx, cam.fy * mu_cam.y / mu_cam.z + cam.cy};
}

Mat3f build_covariance3d(const Vec3f& scale, const Vec4f& q) {
    const double r = q.w, x = q.x, y = q.y, z = q.z;
    const double R[9] = {1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - r * z), 2.0 * (x * z + r * y),
                         2.0 * (x * y + r * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - r * x),
                         2.0 * (x * z - r * y), 2.0 * (y * z + r * x), 1.0 - 2.0 * (x * x + y * y)};

    // M = R * S, Sigma = M * M^T = R S S^T R^T
    const double s[3] = {scale.x, scale.y, scale.z};
    double M[9];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M[i * 3 + j] = R[i * 3 + j] * s[j];
    Mat3f out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += M[i * 3 + k] * M[j * 3 + k];
            out.at(i, j) = static_cast<float>(acc);
        }
    return out;
}

Mat23f jacobian(const Vec3f& mu_cam, const Camera& cam) {
    if (mu_cam.z <= 0.0f) throw std::domain_error("jacobian: depth must be positive");
    const float inv_z = 1.0f / mu_cam.z;
    const float inv_z2 = inv_z * inv_z;
    Mat23f J;
    J.m = {cam.fx * inv_z, 0.0f, -cam.fx * mu_cam.x * inv_z2,
           0.0f, cam.fy * inv_z, -cam.fy * mu_cam.y * inv_z2};
    return J;
}

SymMat2 project_covariance(const Mat3f& cov3d, const Mat3f& view_rot, const Mat23f& J,
                           float dilation) {
    // T = J * W (2x3), then Sigma' = T * Sigma * T^T.
    double T[2][3];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                s += static_cast<double>(J.at(i, k)) * view_rot.at(k, j);
            T[i][j] = s;
        }
    double TS[2][3];  // T * Sigma
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += T[i][k] * cov3d.at(k, j);
            TS[i][j] = s;
        }
    SymMat2 out;
    out.a = static_cast<float>(TS[0][0] * T[0][0] + TS[0][1] * T[0][1] + TS[0][2] * T[0][2] +
                               dilation);
    out.b = static_cast<float>(TS[0][0] * T[1][0] + TS[0][1] * T[1][1] + TS[0][2] * T[1][2]);
    out.c = static_cast<float>(TS[1][0] * T[1][0] + TS[1][1] * T[1][1] + TS[1][2] * T[1][2] +
                               dilation);
    return out;
}

std::pair<float, float> eigenvalues_2x2(const SymMat2& m) {
    const double mid = 0.5 * (static_cast<double>(m.a) + m.c);
    const double half_diff = 0.5 * (static_cast<double>(m.a) - m.c);
    const double d = std::sqrt(std::max(half_diff * half_diff + static_cast<double>(m.b) * m.b, 0.0));
    return {static_cast<float>(mid + d), static_cast<float>(mid - d)};
}

Vec2f eigenvector_2x2(const SymMat2& m, float lambda) {
    // (A - lambda I) v = 0; pick the better-conditioned row.
    Vec2f v;
    if (m.a < m.c) {
        v = {m.b, lambda - m.a};
    } else {
        v = {lambda - m.c, m.b};
    }
    const float n = std::sqrt(v.x * v.x + v.y * v.y);
    if (n < 1e-20f) return {1.0f, 0.0f};  // isotropic
    return {v.x / n, v.y / n};
}

std::optional<SymMat2> invert_2x2(const SymMat2& m) {
    const double det = static_cast<double>(m.a) * m.c - static_cast<double>(m.b) * m.b;
    if (!(det > 1e-12)) return std::nullopt;
    return SymMat2{static_cast<float>(m.c / det), static_cast<float>(-m.b / det),
                   static_cast<float>(m.a / det)};
}

int radius_three_sigma(float lambda_max) {
    return static_cast<int>(std::ceil(3.0f * std::sqrt(std::max(lambda_max, 0.0f))));
}

int radius_opacity_aware(float lambda_max, float opacity) {
    const float scaled = 255.0f * opacity;
    if (scaled <= 1.0f) return 0;
    const float q = 2.0f * std::log(scaled) * std::max(lambda_max, 0.0f);
    return static_cast<int>(std::ceil(std::sqrt(q)));
}

Vec3f eval_sh(const std::array<float, kShCoeffs>& sh, const Vec3f& dir) {
    const double x = dir.x, y = dir.y, z = dir.z;
    const double xx = x * x, yy = y * y, zz = z * z;
    const double xy = x * y, yz = y * z, xz = x * z;

    double basis[kShCoeffsPerChannel];
    basis[0] = kSh0;
    basis[1] = -kSh1 * y;
    basis[2] = kSh1 * z;
    basis[3] = -kSh1 * x;
    basis[4] = kSh2[0] * xy;
    basis[5] = kSh2[1] * yz;
    basis[6] = kSh2[2] * (2.0 * zz - xx - yy);
    basis[7] = kSh2[3] * xz;
    basis[8] = kSh2[4] * (xx - yy);
    basis[9] = kSh3[0] * y * (3.0 * xx - yy);
    basis[10] = kSh3[1] * xy * z;
    basis[11] = kSh3[2] * y * (4.0 * zz - xx - yy);
    basis[12] = kSh3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
    basis[13] = kSh3[4] * x * (4.0 * zz - xx - yy);
    basis[14] = kSh3[5] * z * (xx - yy);
    basis[15] = kSh3[6] * x * (xx - 3.0 * yy);

    Vec3f rgb;
    float* out = &rgb.x;
    for (int ch = 0; ch < 3; ++ch) {
        double s = 0.5;
        for (int i = 0; i < kShCoeffsPerChannel; ++i)
            s += basis[i] * sh[static_cast<size_t>(ch) * kShCoeffsPerChannel + i];
        out[ch] = static_cast<float>(std::max(s, 0.0));
    }
    return rgb;
}

ExpLut::ExpLut() {
    const double h = -static_cast<double>(kMinInput) / kSegments;
    for (int i = 0; i < kSegments; ++i) {
        const double a = static_cast<double>(kMinInput) + i * h;
        const double ea = std::exp(a);
        const double eb = std::exp(a + h);
        const double s = (eb - ea) / h;
        // The chord over-estimates exp; shifting it down by half the maximal
        // gap (reached where the curve slope matches) halves the error and
        // keeps the relative deviation under 1% with 16 segments.
        const double xs = std::log(s);
        const double gap = (ea + s * (xs - a)) - s;
        slope_[i] = static_cast<float>(s);
        intercept_[i] = static_cast<float>(ea - s * a - 0.5 * gap);
    }
}

float ExpLut::operator()(float x) const {
    if (x <= kMinInput) return 0.0f;
    if (x >= 0.0f) return 1.0f;
    int i = static_cast<int>((x - kMinInput) * (kSegments / -kMinInput));
    i = std::clamp(i, 0, kSegments - 1);
    return slope_[i] * x + intercept_[i];
}

const ExpLut& shared_exp_lut() {
    static const ExpLut lut;
    return lut;
}

float exp_by_mode(float x, ExpMode mode) {
    return mode == ExpMode::Exact ? std::exp(x) : shared_exp_lut()(x);
}

float alpha_at_pixel(int px, int py, const ProjectedGaussian& g, ExpMode mode) {
    const Vec2f d{static_cast<float>(px) + 0.5f - g.mean2d.x,
                  static_cast<float>(py) + 0.5f - g.mean2d.y};
    const float exponent = g.log_opacity - 0.5f * g.inv_cov.quad(d);
    return std::min(kAlphaCeiling, exp_by_mode(exponent, mode));
}

void blend_step(float& transmittance, Vec3f& accum, float alpha, const Vec3f& color) {
    const float w = transmittance * alpha;
    accum.x += w * color.x;
    accum.y += w * color.y;
    accum.z += w * color.z;
    transmittance *= 1.0f - alpha;
}

QuadMin min_quadform_over_rect(const SymMat2& A, const Vec2f& mu, float x0, float x1, float y0,
                               float y1) {
    const float dx0 = x0 - mu.x, dx1 = x1 - mu.x;
    const float dy0 = y0 - mu.y, dy1 = y1 - mu.y;
    if (dx0 <= 0.0f && dx1 >= 0.0f && dy0 <= 0.0f && dy1 >= 0.0f) {
        return {0.0f, mu};
    }
    QuadMin best{std::numeric_limits<float>::infinity(), {}};
    auto consider = [&](float dx, float dy) {
        const float q = A.a * dx * dx + 2.0f * A.b * dx * dy + A.c * dy * dy;
        if (q < best.value) best = {q, {mu.x + dx, mu.y + dy}};
    };
    // Vertical edges: fix dx, minimize over dy (unique since A is PD).
    for (float dx : {dx0, dx1}) {
        const float dy = std::clamp(-A.b * dx / A.c, dy0, dy1);
        consider(dx, dy);
    }
    // Horizontal edges.
    for (float dy : {dy0, dy1}) {
        const float dx = std::clamp(-A.b * dy / A.a, dx0, dx1);
        consider(dx, dy);
    }
    return best;
}

}  // namespace splat
