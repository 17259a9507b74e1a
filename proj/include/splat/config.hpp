// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splat/geometry.hpp"

namespace splat {

/// Footprint radius laws. ThreeSigma is the fixed bound ceil(3*sqrt(lambda_max));
/// OpacityAware tightens (or widens) it to the sub-threshold support,
/// ceil(sqrt(2*ln(255*opacity)*lambda_max)).
enum class RadiusLaw { ThreeSigma, OpacityAware };

enum class ExpMode { Exact, Lut };

/// How the gaussian-wise renderer finds each splat's effective pixels:
/// PixelBfs grows the passing region pixel by pixel from a seed; BlockOctant
/// walks fixed-size pixel blocks with directional pruning and block masks.
enum class BoundaryMode { PixelBfs, BlockOctant };

/// Knobs shared by both pipelines. Defaults follow the standard renderer.
struct RenderConfig {
    int tile_size = 16;
    RadiusLaw radius_law = RadiusLaw::ThreeSigma;
    ExpMode exp_mode = ExpMode::Exact;
    float alpha_min = 1.0f / 255.0f;
    float term_threshold = 1e-4f;
    float dilation = 0.3f;  // added to both diagonal entries of the 2D covariance
    Vec3f background{0.0f, 0.0f, 0.0f};
    int threads = 1;
};

inline RenderConfig default_gaussian_wise_render() {
    RenderConfig c;
    c.radius_law = RadiusLaw::OpacityAware;
    return c;
}

/// Configuration of the gaussian-wise pipeline on top of the shared knobs.
struct GaussianWiseConfig {
    RenderConfig render = default_gaussian_wise_render();
    int group_cap = 256;          // max gaussians per depth group
    float depth_threshold = 0.2f; // camera-space depths below this are culled
    int block_size = 8;
    BoundaryMode boundary_mode = BoundaryMode::BlockOctant;
    int initial_bins = 1024;      // uniform depth bins before subdivision
    int subview_size = 0;         // 0 renders the full frame; >= block_size otherwise
};

}  // namespace splat
