// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "splat/camera.hpp"
#include "splat/gaussian.hpp"

namespace splat {

/// Deterministic random stream. Mappings from raw engine output to ranges are
/// fixed here so generated scenes are identical across platforms.
class DetRng {
  public:
    explicit DetRng(std::uint64_t seed) : gen_(static_cast<std::mt19937::result_type>(seed)) {}

    float uniform(float lo, float hi);
    float normal();
    Vec4f unit_quaternion();

  private:
    std::mt19937 gen_;
    bool have_spare_ = false;
    float spare_ = 0.0f;
};

/// Synthetic-scene parameters: positions are drawn inside the camera frustum
/// over [depth_min, depth_max], covering `margin` of the image rectangle.
struct SceneSpec {
    Camera camera;
    float depth_min = 2.0f;
    float depth_max = 12.0f;
    float opacity_min = 0.05f;
    float opacity_max = 0.95f;
    float scale_min = 0.03f;
    float scale_max = 0.25f;
    float margin = 0.9f;
};

SceneSpec default_scene_spec(int width = 256, int height = 256);

/// Fully deterministic for a fixed (seed, n, spec). Throws validation_error
/// on n < 1 or out-of-range spec values.
GaussianModel gen_scene(std::uint64_t seed, int n, const SceneSpec& spec);

}  // namespace splat
