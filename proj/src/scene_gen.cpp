// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include "splat/scene_gen.hpp"

#include <cmath>

#include "splat/error.hpp"

namespace splat {

float DetRng::uniform(float lo, float hi) {
    // Top 24 bits give a portable mapping to [0, 1).
    const float u = static_cast<float>(gen_() >> 8) * (1.0f / 16777216.0f);
    return lo + (hi - lo) * u;
}

float DetRng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    float u1 = uniform(1e-7f, 1.0f);
    float u2 = uniform(0.0f, 1.0f);
    const float r = std::sqrt(-2.0f * std::log(u1));
    const float theta = 6.2831853071795864769f * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

Vec4f DetRng::unit_quaternion() {
    Vec4f q{normal(), normal(), normal(), normal()};
    const float n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
    if (n < 1e-6f) return {1, 0, 0, 0};
    return {q.w / n, q.x / n, q.y / n, q.z / n};
}

SceneSpec default_scene_spec(int width, int height) {
    SceneSpec spec;
    spec.camera = make_camera(width, height, 200.0f, 200.0f, width * 0.5f, height * 0.5f, 0.2f);
    return spec;
}

GaussianModel gen_scene(std::uint64_t seed, int n, const SceneSpec& spec) {
    if (n < 1) throw validation_error("gen_scene: n must be at least 1");
    if (!(spec.depth_min > 0.0f) || !(spec.depth_max >= spec.depth_min))
        throw validation_error("gen_scene: bad depth range");
    if (!(spec.opacity_min > 0.0f) || !(spec.opacity_max < 1.0f) ||
        !(spec.opacity_max >= spec.opacity_min))
        throw validation_error("gen_scene: opacity range must lie inside (0, 1)");
    if (!(spec.scale_min > 0.0f) || !(spec.scale_max >= spec.scale_min))
        throw validation_error("gen_scene: scale range must be positive");
    if (!(spec.margin > 0.0f) || spec.margin > 1.0f)
        throw validation_error("gen_scene: margin must be in (0, 1]");
    validate_camera(spec.camera);

    const Camera& cam = spec.camera;
    const float u_half = 0.5f * spec.margin * cam.width;
    const float v_half = 0.5f * spec.margin * cam.height;
    const Mat3f cam_to_world = transposed(cam.rot);
    const Vec3f cam_center = cam.center();

    DetRng rng(seed * 0x9e3779b97f4a7c15ull + 1);
    GaussianModel model;
    model.source_path = "gen:" + std::to_string(seed);
    model.gaussians.resize(static_cast<size_t>(n));
    for (Gaussian3D& g : model.gaussians) {
        const float z = rng.uniform(spec.depth_min, spec.depth_max);
        const float u = rng.uniform(cam.cx - u_half, cam.cx + u_half);
        const float v = rng.uniform(cam.cy - v_half, cam.cy + v_half);
        const Vec3f in_cam{z * (u - cam.cx) / cam.fx, z * (v - cam.cy) / cam.fy, z};
        g.position = cam_to_world * in_cam + cam_center;

        g.scale = {rng.uniform(spec.scale_min, spec.scale_max),
                   rng.uniform(spec.scale_min, spec.scale_max),
                   rng.uniform(spec.scale_min, spec.scale_max)};
        g.rotation = rng.unit_quaternion();
        g.opacity = rng.uniform(spec.opacity_min, spec.opacity_max);
        g.log_opacity = std::log(g.opacity);
        for (int ch = 0; ch < 3; ++ch) {
            g.sh[static_cast<size_t>(ch) * kShCoeffsPerChannel] = rng.uniform(-1.0f, 1.0f);
            for (int j = 1; j < kShCoeffsPerChannel; ++j)
                g.sh[static_cast<size_t>(ch) * kShCoeffsPerChannel + j] =
                    rng.uniform(-0.1f, 0.1f);
        }
    }
    return model;
}

}  // namespace splat
