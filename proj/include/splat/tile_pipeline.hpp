// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "splat/camera.hpp"
#include "splat/config.hpp"
#include "splat/gaussian.hpp"
#include "splat/image.hpp"
#include "splat/ledger.hpp"
#include "splat/projected.hpp"

namespace splat {

/// (tile, gaussian) bindings with per-tile lists sorted by (depth, src).
struct TileBinning {
    int tile_size = 16;
    int tiles_x = 0;
    int tiles_y = 0;
    std::vector<std::vector<int>> tiles;  // indices into the projected list
    std::uint64_t kv_pairs = 0;
};

/// Stage one of the standard dataflow: every gaussian is loaded and projected
/// regardless of whether rendering will use it. Ledger records one 59-scalar
/// attribute load per input gaussian and one projected-record write per
/// survivor; SH color is always evaluated here.
std::vector<ProjectedGaussian> preprocess_all(const GaussianModel& model, const Camera& cam,
                                              const RenderConfig& cfg, TrafficLedger& ledger);

TileBinning bin_to_tiles(const std::vector<ProjectedGaussian>& projected, const Camera& cam,
                         const RenderConfig& cfg, TrafficLedger& ledger);

/// Front-to-back blending per tile with per-pixel early termination. Each
/// (tile, gaussian) visit re-reads the projected record, which feeds the
/// per-gaussian load-count histogram.
OutputImage render_tiles(const TileBinning& bins, const std::vector<ProjectedGaussian>& projected,
                         const Camera& cam, const RenderConfig& cfg, TrafficLedger& ledger);

/// preprocess + bin + render in one call.
OutputImage render_tile_frame(const GaussianModel& model, const Camera& cam,
                              const RenderConfig& cfg, TrafficLedger& ledger);

struct CoverageCounts {
    std::uint64_t aabb_px = 0;   // fixed 3-sigma axis-aligned square
    std::uint64_t obb_px = 0;    // oriented 3-sigma rectangle
    std::uint64_t alpha_px = 0;  // pixels with alpha >= 1/255 inside the square
};

/// Per-gaussian footprint statistics, clipped to the image bounds.
std::vector<CoverageCounts> coverage_counts(const std::vector<ProjectedGaussian>& projected,
                                            const Camera& cam);

}  // namespace splat
