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

struct GroupMember {
    int index = -1;
    float depth = 0.0f;
};

/// One depth bin of at most `group_cap` members, sorted by (depth, index).
/// Groups are pairwise disjoint slices of the global order, near to far.
struct DepthGroup {
    float depth_lo = 0.0f;  // (lo, hi]
    float depth_hi = 0.0f;
    std::vector<GroupMember> members;
};

/// Stage 1: position-only depth pass, visibility-threshold cull, uniform
/// binning and recursive subdivision down to the group cap. The concatenation
/// of all member lists equals a stable sort of the retained gaussians by
/// (depth, index).
std::vector<DepthGroup> group_by_depth(const GaussianModel& model, const Camera& cam,
                                       const GaussianWiseConfig& cfg, TrafficLedger& ledger);

/// Stage 2: full attribute load and projection for one group's members, with
/// the opacity-aware (or configured) radius law and screen culling. Colors are
/// left unset.
std::vector<ProjectedGaussian> project_group(const DepthGroup& group, const GaussianModel& model,
                                             const Camera& cam, const GaussianWiseConfig& cfg,
                                             TrafficLedger& ledger, const PixelBox& target);

/// Stage 3: SH shading for the survivors only, then the intra-group
/// (depth, index) sort.
void shade_and_sort(std::vector<ProjectedGaussian>& projected, const GaussianModel& model,
                    const Camera& cam, const GaussianWiseConfig& cfg, TrafficLedger& ledger);

/// Per-pixel accumulation state plus the block mask grid. A block's mask turns
/// true exactly when every one of its pixels has transmittance below the
/// termination threshold; masked blocks receive no further alpha work.
class FrameBuffer {
  public:
    FrameBuffer(int x0, int y0, int width, int height, int block_size);

    int x0() const { return x0_; }
    int y0() const { return y0_; }
    int width() const { return width_; }
    int height() const { return height_; }
    int block_size() const { return block_; }
    int blocks_x() const { return blocks_x_; }
    int blocks_y() const { return blocks_y_; }
    PixelBox rect() const { return {x0_, y0_, x0_ + width_ - 1, y0_ + height_ - 1}; }

    float transmittance(int px, int py) const { return T_[index(px, py)]; }
    float& transmittance(int px, int py) { return T_[index(px, py)]; }
    Vec3f& accum(int px, int py) { return color_[index(px, py)]; }

    int block_index(int px, int py) const {
        return ((py - y0_) / block_) * blocks_x_ + (px - x0_) / block_;
    }
    bool block_masked(int bx, int by) const { return masked_[by * blocks_x_ + bx] != 0; }
    bool all_masked() const { return masked_count_ == blocks_x_ * blocks_y_; }

    /// Re-checks the given blocks and masks any whose pixels all fell below the
    /// termination threshold.
    void refresh_masks(const std::vector<int>& touched_blocks, float term_threshold);

    PixelBox block_pixels(int bx, int by) const;

    /// Composites accumulated color over the background into `out` (which is
    /// full-frame; this buffer writes its own rectangle).
    void finalize(const Vec3f& background, OutputImage& out) const;

  private:
    int index(int px, int py) const {
        return (py - y0_) * width_ + (px - x0_);
    }

    int x0_, y0_, width_, height_, block_;
    int blocks_x_, blocks_y_;
    int masked_count_ = 0;
    std::vector<float> T_;
    std::vector<Vec3f> color_;
    std::vector<std::uint8_t> masked_;
};

struct Pixel {
    int x = 0;
    int y = 0;
    bool operator==(const Pixel&) const = default;
};

/// Breadth-first growth of the passing region from the pixel nearest the
/// projected center: a pixel joins iff alpha >= alpha_min, neighbors expand
/// only from passing pixels (8-connectivity), and the result is exactly the
/// 8-connected passing component containing the seed (empty when the seed
/// fails). Operates on the full rectangle, ignoring block masks.
std::vector<Pixel> identify_boundary_pixels(const ProjectedGaussian& g, int width, int height,
                                            const GaussianWiseConfig& cfg);

struct BlockRef {
    int bx = 0;
    int by = 0;
    bool passing = false;  // at least one pixel at or above alpha_min
};

/// Block-level traversal from the block holding the center (or the nearest
/// in-bounds point when the center is off-screen): evaluated blocks in visit
/// order. Expansion follows passing pixels plus an exact convexity test on the
/// sub-threshold ellipse, so every effective pixel in an unmasked block lands
/// in a returned block. Masked blocks are passed through without evaluation.
std::vector<BlockRef> traverse_blocks(const ProjectedGaussian& g, const FrameBuffer& fb,
                                      const GaussianWiseConfig& cfg);

/// Stage 4 for one splat: evaluate its effective pixels per the boundary mode,
/// skip pixels already below the termination threshold, blend the rest, then
/// refresh the block masks it touched.
void blend_gaussian(const ProjectedGaussian& g, FrameBuffer& fb, const GaussianWiseConfig& cfg,
                    TrafficLedger& ledger);

/// Full gaussian-wise frame: groups near to far, stages 2-4 per group, and the
/// cross-stage skip once every block is masked (remaining groups are never
/// loaded, projected, or shaded).
OutputImage render_gaussian_wise(const GaussianModel& model, const Camera& cam,
                                 const GaussianWiseConfig& cfg, TrafficLedger& ledger);

/// Sub-view mode: the frame is split into subview_size squares, each rendered
/// independently through the same pipeline; splats are assigned to every
/// sub-view their pixel box overlaps and re-loaded per sub-view.
OutputImage render_subviews(const GaussianModel& model, const Camera& cam,
                            const GaussianWiseConfig& cfg, TrafficLedger& ledger);

/// Number of sub-views the configuration yields for this camera (1 when off).
int subview_count(const Camera& cam, const GaussianWiseConfig& cfg);

}  // namespace splat
