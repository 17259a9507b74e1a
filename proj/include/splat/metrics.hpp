// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "splat/camera.hpp"
#include "splat/config.hpp"
#include "splat/gaussian.hpp"
#include "splat/image.hpp"
#include "splat/tile_pipeline.hpp"

namespace splat {

struct QualityReport {
    double psnr = 0.0;  // dB, +inf flagged via exact_match
    bool exact_match = false;
    double max_abs_err = 0.0;
    std::uint64_t pixel_count = 0;
};

/// 10*log10(1/MSE) over all channels with peak 1.0, measured pre-quantization.
/// Throws validation_error on a dimension mismatch.
QualityReport psnr(const OutputImage& a, const OutputImage& b);

struct CoverageTotals {
    std::uint64_t aabb_px = 0;
    std::uint64_t obb_px = 0;
    std::uint64_t alpha_px = 0;
    std::uint64_t gaussians = 0;
};

/// Sums coverage_counts over all surviving gaussians of a frame.
CoverageTotals coverage_report(const GaussianModel& model, const Camera& cam,
                               const RenderConfig& cfg);

}  // namespace splat
