// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include "splat/gaussian_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splat/error.hpp"
#include "splat/kernels.hpp"
#include "parallel.hpp"

namespace splat {

namespace {

constexpr std::uint64_t kPositionScalars = 3;
constexpr std::uint64_t kDepthIdScalars = 2;

bool member_order(const GroupMember& a, const GroupMember& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.index < b.index;
}

// Splits a (depth, index)-sorted run into contiguous groups of at most `cap`
// members. Splitting at a depth change keeps group ranges disjoint; runs of
// one identical depth fall back to even index splits to honor the cap.
void split_sorted_run(std::vector<GroupMember>&& run, int cap, std::vector<DepthGroup>& out) {
    if (static_cast<int>(run.size()) <= cap) {
        DepthGroup g;
        g.depth_lo = run.front().depth;
        g.depth_hi = run.back().depth;
        g.members = std::move(run);
        out.push_back(std::move(g));
        return;
    }
    const size_t size = run.size();
    const size_t mid = size / 2;
    const float dm = run[mid].depth;
    const auto lb = static_cast<size_t>(
        std::lower_bound(run.begin(), run.end(), dm,
                         [](const GroupMember& m, float d) { return m.depth < d; }) -
        run.begin());
    const auto ub = static_cast<size_t>(
        std::upper_bound(run.begin(), run.end(), dm,
                         [](float d, const GroupMember& m) { return d < m.depth; }) -
        run.begin());
    size_t sp;
    if (lb > 0) {
        sp = lb;
    } else if (ub < size) {
        sp = ub;
    } else {
        sp = mid;
    }
    std::vector<GroupMember> left(run.begin(), run.begin() + static_cast<std::ptrdiff_t>(sp));
    std::vector<GroupMember> right(run.begin() + static_cast<std::ptrdiff_t>(sp), run.end());
    split_sorted_run(std::move(left), cap, out);
    split_sorted_run(std::move(right), cap, out);
}

}  // namespace

std::vector<DepthGroup> group_by_depth(const GaussianModel& model, const Camera& cam,
                                       const GaussianWiseConfig& cfg, TrafficLedger& ledger) {
    const int n = model.count();
    ledger.record(Traffic::GaussPosition, static_cast<std::uint64_t>(n) * kPositionScalars);

    std::vector<GroupMember> retained;
    retained.reserve(static_cast<size_t>(n));
    float max_depth = cfg.depth_threshold;
    for (int i = 0; i < n; ++i) {
        const float d = view_transform(model.gaussians[static_cast<size_t>(i)].position, cam).z;
        if (d < cfg.depth_threshold) continue;
        retained.push_back({i, d});
        max_depth = std::max(max_depth, d);
    }
    ledger.record(Traffic::DepthId, retained.size() * kDepthIdScalars);
    if (retained.empty()) return {};

    const int bins = std::max(1, cfg.initial_bins);
    const float width = (max_depth - cfg.depth_threshold) / static_cast<float>(bins);
    std::vector<std::vector<GroupMember>> buckets(static_cast<size_t>(bins));
    for (const GroupMember& m : retained) {
        int b = width > 0.0f
                    ? static_cast<int>((m.depth - cfg.depth_threshold) / width)
                    : 0;
        b = std::clamp(b, 0, bins - 1);
        buckets[static_cast<size_t>(b)].push_back(m);
    }

    std::vector<DepthGroup> groups;
    for (auto& bucket : buckets) {
        if (bucket.empty()) continue;
        std::sort(bucket.begin(), bucket.end(), member_order);
        split_sorted_run(std::move(bucket), std::max(1, cfg.group_cap), groups);
    }
    return groups;
}

std::vector<ProjectedGaussian> project_group(const DepthGroup& group, const GaussianModel& model,
                                             const Camera& cam, const GaussianWiseConfig& cfg,
                                             TrafficLedger& ledger, const PixelBox& target) {
    const int n = static_cast<int>(group.members.size());
    std::vector<std::optional<ProjectedGaussian>> slots(static_cast<size_t>(n));
    parallel_chunks(n, cfg.render.threads, [&](int begin, int end) {
        for (int k = begin; k < end; ++k) {
            const int idx = group.members[static_cast<size_t>(k)].index;
            ledger.record(Traffic::Gauss3dAttr, kGaussianScalars, idx);
            slots[static_cast<size_t>(k)] =
                project_gaussian(model.gaussians[static_cast<size_t>(idx)], idx, cam,
                                 cfg.render.radius_law, cfg.render.dilation, target);
        }
    });
    ledger.add_projections(static_cast<std::uint64_t>(n));

    std::vector<ProjectedGaussian> out;
    out.reserve(static_cast<size_t>(n));
    for (auto& s : slots)
        if (s) out.push_back(*s);
    return out;
}

void shade_and_sort(std::vector<ProjectedGaussian>& projected, const GaussianModel& model,
                    const Camera& cam, const GaussianWiseConfig& cfg, TrafficLedger& ledger) {
    const Vec3f cam_center = cam.center();
    const int n = static_cast<int>(projected.size());
    parallel_chunks(n, cfg.render.threads, [&](int begin, int end) {
        for (int k = begin; k < end; ++k) {
            ProjectedGaussian& pg = projected[static_cast<size_t>(k)];
            const Gaussian3D& g = model.gaussians[static_cast<size_t>(pg.src)];
            pg.color = eval_sh(g.sh, normalized(g.position - cam_center));
        }
    });
    ledger.record(Traffic::ShCoeff, static_cast<std::uint64_t>(n) * kShCoeffs);
    ledger.add_sh_evals(static_cast<std::uint64_t>(n));
    std::sort(projected.begin(), projected.end(), depth_order);
}

FrameBuffer::FrameBuffer(int x0, int y0, int width, int height, int block_size)
    : x0_(x0),
      y0_(y0),
      width_(width),
      height_(height),
      block_(std::max(1, block_size)),
      blocks_x_((width + block_ - 1) / block_),
      blocks_y_((height + block_ - 1) / block_),
      T_(static_cast<size_t>(width) * height, 1.0f),
      color_(static_cast<size_t>(width) * height),
      masked_(static_cast<size_t>(blocks_x_) * blocks_y_, 0) {}

PixelBox FrameBuffer::block_pixels(int bx, int by) const {
    PixelBox b{x0_ + bx * block_, y0_ + by * block_, x0_ + (bx + 1) * block_ - 1,
               y0_ + (by + 1) * block_ - 1};
    return intersect(b, rect());
}

void FrameBuffer::refresh_masks(const std::vector<int>& touched_blocks, float term_threshold) {
    for (int b : touched_blocks) {
        if (masked_[static_cast<size_t>(b)]) continue;
        const int bx = b % blocks_x_;
        const int by = b / blocks_x_;
        const PixelBox pb = block_pixels(bx, by);
        bool all_done = true;
        for (int py = pb.y0; py <= pb.y1 && all_done; ++py)
            for (int px = pb.x0; px <= pb.x1; ++px)
                if (T_[static_cast<size_t>(index(px, py))] >= term_threshold) {
                    all_done = false;
                    break;
                }
        if (all_done) {
            masked_[static_cast<size_t>(b)] = 1;
            ++masked_count_;
        }
    }
}

void FrameBuffer::finalize(const Vec3f& background, OutputImage& out) const {
    for (int py = y0_; py < y0_ + height_; ++py)
        for (int px = x0_; px < x0_ + width_; ++px) {
            const size_t i = static_cast<size_t>(index(px, py));
            const Vec3f c = color_[i] + T_[i] * background;
            out.at(px, py) = {std::clamp(c.x, 0.0f, 1.0f), std::clamp(c.y, 0.0f, 1.0f),
                              std::clamp(c.z, 0.0f, 1.0f)};
        }
}

namespace {

/// Reusable per-frame traversal workspace; epoch stamps avoid per-gaussian
/// clears.
struct BlendScratch {
    std::vector<std::uint32_t> block_stamp;
    std::vector<std::uint32_t> pixel_stamp;
    std::vector<int> block_queue;
    std::vector<Pixel> pixel_queue;
    std::vector<std::pair<Pixel, float>> passing;
    std::vector<int> touched;
    std::vector<std::uint32_t> touched_stamp;
    std::uint32_t epoch = 0;

    void next_epoch(size_t blocks, size_t pixels) {
        if (block_stamp.size() < blocks) block_stamp.resize(blocks, 0);
        if (pixel_stamp.size() < pixels) pixel_stamp.resize(pixels, 0);
        if (touched_stamp.size() < blocks) touched_stamp.resize(blocks, 0);
        if (++epoch == 0) {  // wrapped; clear everything once
            std::fill(block_stamp.begin(), block_stamp.end(), 0);
            std::fill(pixel_stamp.begin(), pixel_stamp.end(), 0);
            std::fill(touched_stamp.begin(), touched_stamp.end(), 0);
            epoch = 1;
        }
        block_queue.clear();
        pixel_queue.clear();
        passing.clear();
        touched.clear();
    }
};

/// Largest quadratic form still able to pass the alpha floor, with slack for
/// the lookup-table wobble and float rounding. Expansion and pruning compare
/// the exact continuous minimum against this bound.
float pass_bound(const ProjectedGaussian& g, const RenderConfig& rc) {
    if (rc.alpha_min > kAlphaCeiling || rc.alpha_min <= 0.0f) return -1.0f;
    const float c = 2.0f * (g.log_opacity - std::log(rc.alpha_min));
    const float lut_slack = rc.exp_mode == ExpMode::Lut ? 0.0202f : 0.0f;
    return c + lut_slack + 1e-3f;
}

struct ContRect {
    float x0, y0, x1, y1;
    bool empty() const { return x0 > x1 || y0 > y1; }
};

ContRect continuous(const PixelBox& b) {
    return {static_cast<float>(b.x0), static_cast<float>(b.y0), static_cast<float>(b.x1 + 1),
            static_cast<float>(b.y1 + 1)};
}

float min_q(const ProjectedGaussian& g, const ContRect& r) {
    if (r.empty()) return std::numeric_limits<float>::infinity();
    return min_quadform_over_rect(g.inv_cov, g.mean2d, r.x0, r.x1, r.y0, r.y1).value;
}

// Breadth-first block walk. on_pixel(px, py, alpha, passing) fires for every
// pixel of every evaluated block; out_blocks (optional) receives the evaluated
// blocks in visit order.
template <class PixelFn>
void walk_blocks(const ProjectedGaussian& g, const FrameBuffer& fb, const GaussianWiseConfig& cfg,
                 BlendScratch& ws, std::vector<BlockRef>* out_blocks, PixelFn&& on_pixel) {
    const PixelBox domain = intersect(gaussian_pixel_box(g), fb.rect());
    if (domain.empty()) return;
    const ContRect dom = continuous(domain);
    const float bound = pass_bound(g, cfg.render);
    const int b = fb.block_size();

    // Local block range covering the domain.
    const int bx0 = (domain.x0 - fb.x0()) / b, bx1 = (domain.x1 - fb.x0()) / b;
    const int by0 = (domain.y0 - fb.y0()) / b, by1 = (domain.y1 - fb.y0()) / b;

    ws.next_epoch(static_cast<size_t>(fb.blocks_x()) * fb.blocks_y(),
                  static_cast<size_t>(fb.width()) * fb.height());

    // Seed at the block holding the in-domain point closest to the center in
    // the footprint metric; for in-bounds centers this is the center block.
    const QuadMin qm = min_quadform_over_rect(g.inv_cov, g.mean2d, dom.x0, dom.x1, dom.y0, dom.y1);
    int sx = std::clamp(static_cast<int>((qm.at.x - static_cast<float>(fb.x0())) / static_cast<float>(b)), bx0, bx1);
    int sy = std::clamp(static_cast<int>((qm.at.y - static_cast<float>(fb.y0())) / static_cast<float>(b)), by0, by1);

    auto block_id = [&](int bx, int by) { return by * fb.blocks_x() + bx; };
    auto try_enqueue = [&](int bx, int by) {
        if (bx < bx0 || bx > bx1 || by < by0 || by > by1) return;
        std::uint32_t& st = ws.block_stamp[static_cast<size_t>(block_id(bx, by))];
        if (st == ws.epoch) return;
        st = ws.epoch;
        ws.block_queue.push_back(block_id(bx, by));
    };
    try_enqueue(sx, sy);

    static constexpr int kDir[8][2] = {{1, 0}, {-1, 0}, {0, 1},  {0, -1},
                                       {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

    for (size_t head = 0; head < ws.block_queue.size(); ++head) {
        const int id = ws.block_queue[head];
        const int bx = id % fb.blocks_x();
        const int by = id / fb.blocks_x();
        const PixelBox pixels = intersect(fb.block_pixels(bx, by), domain);
        const ContRect cell{std::max(dom.x0, static_cast<float>(fb.x0() + bx * b)),
                            std::max(dom.y0, static_cast<float>(fb.y0() + by * b)),
                            std::min(dom.x1, static_cast<float>(fb.x0() + (bx + 1) * b)),
                            std::min(dom.y1, static_cast<float>(fb.y0() + (by + 1) * b))};

        if (fb.block_masked(bx, by)) {
            // Pass through without evaluation so a terminated region cannot
            // disconnect live pixels beyond it.
            if (min_q(g, cell) <= bound)
                for (const auto& d : kDir) try_enqueue(bx + d[0], by + d[1]);
            continue;
        }

        bool passing = false;
        bool edge_pass[8] = {};
        for (int py = pixels.y0; py <= pixels.y1; ++py)
            for (int px = pixels.x0; px <= pixels.x1; ++px) {
                const float a = alpha_at_pixel(px, py, g, cfg.render.exp_mode);
                const bool pass = a >= cfg.render.alpha_min;
                on_pixel(px, py, a, pass);
                if (!pass) continue;
                passing = true;
                const bool e = px == pixels.x1, w = px == pixels.x0;
                const bool s = py == pixels.y1, n = py == pixels.y0;
                edge_pass[0] |= e;
                edge_pass[1] |= w;
                edge_pass[2] |= s;
                edge_pass[3] |= n;
                edge_pass[4] |= e && s;
                edge_pass[5] |= e && n;
                edge_pass[6] |= w && s;
                edge_pass[7] |= w && n;
            }
        if (out_blocks) out_blocks->push_back({bx, by, passing});

        if (!passing && min_q(g, cell) > bound) continue;  // dead fringe block

        for (const auto& d : kDir) try_enqueue(bx + d[0], by + d[1]);

        // Directional pruning: when a block's outward boundary pixels all fail
        // and the footprint provably misses the remaining lane, mark the ray of
        // blocks to the edge as visited without evaluation.
        for (int dir = 0; dir < 8; ++dir) {
            if (edge_pass[dir]) continue;
            const int dx = kDir[dir][0], dy = kDir[dir][1];
            ContRect lane = dom;
            if (dx > 0) lane.x0 = static_cast<float>(fb.x0() + (bx + 1) * b);
            if (dx < 0) lane.x1 = static_cast<float>(fb.x0() + bx * b);
            if (dy > 0) lane.y0 = static_cast<float>(fb.y0() + (by + 1) * b);
            if (dy < 0) lane.y1 = static_cast<float>(fb.y0() + by * b);
            if (dx == 0) {
                lane.x0 = cell.x0;
                lane.x1 = cell.x1;
            }
            if (dy == 0) {
                lane.y0 = cell.y0;
                lane.y1 = cell.y1;
            }
            lane.x0 = std::max(lane.x0, dom.x0);
            lane.x1 = std::min(lane.x1, dom.x1);
            lane.y0 = std::max(lane.y0, dom.y0);
            lane.y1 = std::min(lane.y1, dom.y1);
            if (lane.empty()) continue;
            if (min_q(g, lane) > bound) {
                for (int k = 1;; ++k) {
                    const int rx = bx + k * dx, ry = by + k * dy;
                    if (rx < bx0 || rx > bx1 || ry < by0 || ry > by1) break;
                    ws.block_stamp[static_cast<size_t>(block_id(rx, ry))] = ws.epoch;
                }
            }
        }
    }
}

// Pixel-level breadth-first growth used by the boundary op and the pixel mode.
// Returns passing pixels (with cached alphas) in ws.passing; probe counts the
// failing frontier. block_slots sizes the touched-block scratch for callers
// that blend afterwards.
void boundary_bfs(const ProjectedGaussian& g, const PixelBox& rect, const GaussianWiseConfig& cfg,
                  BlendScratch& ws, std::uint64_t& probes, size_t block_slots) {
    ws.next_epoch(block_slots, static_cast<size_t>(rect.x1 - rect.x0 + 1) *
                                   static_cast<size_t>(rect.y1 - rect.y0 + 1));
    const int w = rect.x1 - rect.x0 + 1;
    auto stamp_at = [&](int px, int py) -> std::uint32_t& {
        return ws.pixel_stamp[static_cast<size_t>(py - rect.y0) * static_cast<size_t>(w) +
                              static_cast<size_t>(px - rect.x0)];
    };

    const Pixel seed{std::clamp(static_cast<int>(std::floor(g.mean2d.x)), rect.x0, rect.x1),
                     std::clamp(static_cast<int>(std::floor(g.mean2d.y)), rect.y0, rect.y1)};
    stamp_at(seed.x, seed.y) = ws.epoch;
    const float sa = alpha_at_pixel(seed.x, seed.y, g, cfg.render.exp_mode);
    if (sa < cfg.render.alpha_min) {
        ++probes;
        return;
    }
    ws.passing.push_back({seed, sa});
    ws.pixel_queue.push_back(seed);

    for (size_t head = 0; head < ws.pixel_queue.size(); ++head) {
        const Pixel p = ws.pixel_queue[head];
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int qx = p.x + dx, qy = p.y + dy;
                if (qx < rect.x0 || qx > rect.x1 || qy < rect.y0 || qy > rect.y1) continue;
                std::uint32_t& st = stamp_at(qx, qy);
                if (st == ws.epoch) continue;
                st = ws.epoch;
                const float a = alpha_at_pixel(qx, qy, g, cfg.render.exp_mode);
                if (a >= cfg.render.alpha_min) {
                    ws.passing.push_back({{qx, qy}, a});
                    ws.pixel_queue.push_back({qx, qy});
                } else {
                    ++probes;
                }
            }
    }
}

void blend_gaussian_ws(const ProjectedGaussian& g, FrameBuffer& fb, const GaussianWiseConfig& cfg,
                       TrafficLedger& ledger, BlendScratch& ws) {
    std::uint64_t alpha_evals = 0, probes = 0, blends = 0;
    auto touch = [&](int px, int py) {
        const int b = fb.block_index(px, py);
        std::uint32_t& st = ws.touched_stamp[static_cast<size_t>(b)];
        if (st != ws.epoch) {
            st = ws.epoch;
            ws.touched.push_back(b);
        }
    };
    auto blend_pixel = [&](int px, int py, float a) {
        float& T = fb.transmittance(px, py);
        if (T < cfg.render.term_threshold) return;  // pixel already terminated
        blend_step(T, fb.accum(px, py), a, g.color);
        ++blends;
        touch(px, py);
    };

    if (cfg.boundary_mode == BoundaryMode::BlockOctant) {
        walk_blocks(g, fb, cfg, ws, nullptr, [&](int px, int py, float a, bool pass) {
            ++alpha_evals;
            if (pass) blend_pixel(px, py, a);
        });
    } else {
        boundary_bfs(g, fb.rect(), cfg, ws, probes,
                     static_cast<size_t>(fb.blocks_x()) * fb.blocks_y());
        alpha_evals += ws.passing.size();
        for (const auto& [p, a] : ws.passing) blend_pixel(p.x, p.y, a);
    }
    fb.refresh_masks(ws.touched, cfg.render.term_threshold);
    ledger.add_alpha_evals(alpha_evals);
    ledger.add_boundary_probes(probes);
    ledger.add_blend_steps(blends);
}

}  // namespace

std::vector<Pixel> identify_boundary_pixels(const ProjectedGaussian& g, int width, int height,
                                            const GaussianWiseConfig& cfg) {
    BlendScratch ws;
    std::uint64_t probes = 0;
    boundary_bfs(g, screen_box(width, height), cfg, ws, probes, 1);
    std::vector<Pixel> out;
    out.reserve(ws.passing.size());
    for (const auto& [p, a] : ws.passing) out.push_back(p);
    return out;
}

std::vector<BlockRef> traverse_blocks(const ProjectedGaussian& g, const FrameBuffer& fb,
                                      const GaussianWiseConfig& cfg) {
    BlendScratch ws;
    std::vector<BlockRef> blocks;
    walk_blocks(g, fb, cfg, ws, &blocks, [](int, int, float, bool) {});
    return blocks;
}

void blend_gaussian(const ProjectedGaussian& g, FrameBuffer& fb, const GaussianWiseConfig& cfg,
                    TrafficLedger& ledger) {
    BlendScratch ws;
    blend_gaussian_ws(g, fb, cfg, ledger, ws);
}

namespace {

void render_into(const GaussianModel& model, const Camera& cam, const GaussianWiseConfig& cfg,
                 TrafficLedger& ledger, const std::vector<DepthGroup>& groups, FrameBuffer& fb) {
    BlendScratch ws;
    for (const DepthGroup& group : groups) {
        // Cross-stage skip: once every block is terminated, remaining groups
        // are never loaded, projected, or shaded.
        if (fb.all_masked()) break;
        auto projected = project_group(group, model, cam, cfg, ledger, fb.rect());
        shade_and_sort(projected, model, cam, cfg, ledger);
        for (const ProjectedGaussian& g : projected) blend_gaussian_ws(g, fb, cfg, ledger, ws);
    }
}

}  // namespace

OutputImage render_gaussian_wise(const GaussianModel& model, const Camera& cam,
                                 const GaussianWiseConfig& cfg, TrafficLedger& ledger) {
    const auto groups = group_by_depth(model, cam, cfg, ledger);
    FrameBuffer fb(0, 0, cam.width, cam.height, cfg.block_size);
    render_into(model, cam, cfg, ledger, groups, fb);
    OutputImage img = make_image(cam.width, cam.height);
    fb.finalize(cfg.render.background, img);
    return img;
}

int subview_count(const Camera& cam, const GaussianWiseConfig& cfg) {
    if (cfg.subview_size <= 0) return 1;
    const int sx = (cam.width + cfg.subview_size - 1) / cfg.subview_size;
    const int sy = (cam.height + cfg.subview_size - 1) / cfg.subview_size;
    return sx * sy;
}

OutputImage render_subviews(const GaussianModel& model, const Camera& cam,
                            const GaussianWiseConfig& cfg, TrafficLedger& ledger) {
    if (cfg.subview_size < cfg.block_size)
        throw validation_error("subview size must be at least the block size");
    const int s = cfg.subview_size;
    const int svx = (cam.width + s - 1) / s;
    const int svy = (cam.height + s - 1) / s;
    const int sv_count = svx * svy;

    const auto groups = group_by_depth(model, cam, cfg, ledger);
    const PixelBox screen = screen_box(cam.width, cam.height);

    // Spatial binning: each retained splat is assigned to every sub-view its
    // pixel box overlaps; splats that will be culled at projection anyway are
    // assigned to the sub-view under their center so their load is still
    // booked exactly once. The projection cache is bookkeeping; the ledger
    // records a full attribute load per (gaussian, sub-view) below.
    std::vector<std::optional<ProjectedGaussian>> cache(
        static_cast<size_t>(model.count()));
    const PixelBox unbounded{std::numeric_limits<int>::min() / 2,
                             std::numeric_limits<int>::min() / 2,
                             std::numeric_limits<int>::max() / 2,
                             std::numeric_limits<int>::max() / 2};
    std::vector<std::vector<std::vector<GroupMember>>> assigned(
        static_cast<size_t>(sv_count),
        std::vector<std::vector<GroupMember>>(groups.size()));
    for (size_t gi = 0; gi < groups.size(); ++gi) {
        for (const GroupMember& m : groups[gi].members) {
            auto pg = project_gaussian(model.gaussians[static_cast<size_t>(m.index)], m.index, cam,
                                       cfg.render.radius_law, cfg.render.dilation, unbounded);
            PixelBox box;
            if (pg) {
                box = intersect(gaussian_pixel_box(*pg), screen);
                cache[static_cast<size_t>(m.index)] = std::move(pg);
            }
            if (box.empty()) {
                const Vec3f mu_cam =
                    view_transform(model.gaussians[static_cast<size_t>(m.index)].position, cam);
                const Vec2f mean = project_to_screen(mu_cam, cam);
                const int px = std::clamp(static_cast<int>(std::floor(mean.x)), 0, cam.width - 1);
                const int py = std::clamp(static_cast<int>(std::floor(mean.y)), 0, cam.height - 1);
                box = {px, py, px, py};
            }
            const int tx0 = box.x0 / s, tx1 = box.x1 / s;
            const int ty0 = box.y0 / s, ty1 = box.y1 / s;
            for (int ty = ty0; ty <= ty1; ++ty)
                for (int tx = tx0; tx <= tx1; ++tx)
                    assigned[static_cast<size_t>(ty) * svx + tx][gi].push_back(m);
        }
    }

    // Pre-shade cached survivors once; per-sub-view SH loads are recorded when
    // each sub-view consumes them.
    const Vec3f cam_center = cam.center();
    for (auto& pg : cache)
        if (pg)
            pg->color = eval_sh(model.gaussians[static_cast<size_t>(pg->src)].sh,
                                normalized(model.gaussians[static_cast<size_t>(pg->src)].position -
                                           cam_center));

    OutputImage img = make_image(cam.width, cam.height, cfg.render.background);
    parallel_chunks(sv_count, cfg.render.threads, [&](int begin, int end) {
        BlendScratch ws;
        for (int sv = begin; sv < end; ++sv) {
            const int tx = sv % svx, ty = sv / svx;
            const PixelBox rect =
                intersect({tx * s, ty * s, (tx + 1) * s - 1, (ty + 1) * s - 1}, screen);
            FrameBuffer fb(rect.x0, rect.y0, rect.x1 - rect.x0 + 1, rect.y1 - rect.y0 + 1,
                           cfg.block_size);
            for (size_t gi = 0; gi < groups.size(); ++gi) {
                if (fb.all_masked()) break;
                const auto& members = assigned[static_cast<size_t>(sv)][gi];
                if (members.empty()) continue;
                std::vector<ProjectedGaussian> projected;
                projected.reserve(members.size());
                for (const GroupMember& m : members) {
                    ledger.record(Traffic::Gauss3dAttr, kGaussianScalars, m.index);
                    const auto& pg = cache[static_cast<size_t>(m.index)];
                    if (!pg) continue;
                    if (intersect(gaussian_pixel_box(*pg), rect).empty()) continue;
                    projected.push_back(*pg);
                }
                ledger.add_projections(members.size());
                ledger.record(Traffic::ShCoeff, projected.size() * kShCoeffs);
                ledger.add_sh_evals(projected.size());
                std::sort(projected.begin(), projected.end(), depth_order);
                for (const ProjectedGaussian& g : projected) blend_gaussian_ws(g, fb, cfg, ledger, ws);
            }
            fb.finalize(cfg.render.background, img);
        }
    });
    return img;
}

}  // namespace splat
