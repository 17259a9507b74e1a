// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include "splat/tile_pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "splat/kernels.hpp"
#include "parallel.hpp"

namespace splat {

namespace {

constexpr std::uint64_t kEllipseScalars = 8;
constexpr std::uint64_t kKvScalars = 2;

}  // namespace

std::vector<ProjectedGaussian> preprocess_all(const GaussianModel& model, const Camera& cam,
                                              const RenderConfig& cfg, TrafficLedger& ledger) {
    const int n = model.count();
    // Every gaussian is read in full up front; that is the defining cost of the
    // two-stage dataflow.
    ledger.record(Traffic::Gauss3dAttr, static_cast<std::uint64_t>(n) * kGaussianScalars);

    const PixelBox screen = screen_box(cam.width, cam.height);
    const Vec3f cam_center = cam.center();
    std::vector<std::optional<ProjectedGaussian>> slots(static_cast<size_t>(n));
    parallel_chunks(n, cfg.threads, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            const Gaussian3D& g = model.gaussians[static_cast<size_t>(i)];
            const Vec3f mu_cam = view_transform(g.position, cam);
            if (mu_cam.z <= cam.znear) continue;
            auto pg = project_gaussian(g, i, cam, cfg.radius_law, cfg.dilation, screen);
            if (!pg) continue;
            pg->color = eval_sh(g.sh, normalized(g.position - cam_center));
            slots[static_cast<size_t>(i)] = *pg;
        }
    });
    ledger.add_projections(static_cast<std::uint64_t>(n));
    ledger.add_sh_evals(static_cast<std::uint64_t>(n));

    std::vector<ProjectedGaussian> out;
    out.reserve(static_cast<size_t>(n));
    for (auto& s : slots)
        if (s) out.push_back(*s);
    ledger.record(Traffic::Ellipse2d, out.size() * kEllipseScalars);  // record writes
    return out;
}

TileBinning bin_to_tiles(const std::vector<ProjectedGaussian>& projected, const Camera& cam,
                         const RenderConfig& cfg, TrafficLedger& ledger) {
    TileBinning bins;
    bins.tile_size = cfg.tile_size;
    bins.tiles_x = (cam.width + cfg.tile_size - 1) / cfg.tile_size;
    bins.tiles_y = (cam.height + cfg.tile_size - 1) / cfg.tile_size;
    bins.tiles.assign(static_cast<size_t>(bins.tiles_x) * bins.tiles_y, {});

    const PixelBox screen = screen_box(cam.width, cam.height);
    for (size_t i = 0; i < projected.size(); ++i) {
        const PixelBox box = intersect(gaussian_pixel_box(projected[i]), screen);
        if (box.empty()) continue;
        const int tx0 = box.x0 / cfg.tile_size, tx1 = box.x1 / cfg.tile_size;
        const int ty0 = box.y0 / cfg.tile_size, ty1 = box.y1 / cfg.tile_size;
        for (int ty = ty0; ty <= ty1; ++ty)
            for (int tx = tx0; tx <= tx1; ++tx) {
                bins.tiles[static_cast<size_t>(ty) * bins.tiles_x + tx].push_back(
                    static_cast<int>(i));
                ++bins.kv_pairs;
            }
    }
    ledger.record(Traffic::KvPair, bins.kv_pairs * kKvScalars);

    for (auto& list : bins.tiles) {
        std::sort(list.begin(), list.end(), [&](int a, int b) {
            return depth_order(projected[static_cast<size_t>(a)],
                               projected[static_cast<size_t>(b)]);
        });
    }
    return bins;
}

OutputImage render_tiles(const TileBinning& bins, const std::vector<ProjectedGaussian>& projected,
                         const Camera& cam, const RenderConfig& cfg, TrafficLedger& ledger) {
    OutputImage img = make_image(cam.width, cam.height);
    std::vector<float> T(static_cast<size_t>(cam.width) * cam.height, 1.0f);
    std::vector<Vec3f> accum(static_cast<size_t>(cam.width) * cam.height);
    const PixelBox screen = screen_box(cam.width, cam.height);
    const int tile_count = bins.tiles_x * bins.tiles_y;

    parallel_chunks(tile_count, cfg.threads, [&](int begin, int end) {
        std::uint64_t alpha_evals = 0, blend_steps = 0;
        for (int t = begin; t < end; ++t) {
            const int tx = t % bins.tiles_x;
            const int ty = t / bins.tiles_x;
            const PixelBox tile = intersect({tx * bins.tile_size, ty * bins.tile_size,
                                             (tx + 1) * bins.tile_size - 1,
                                             (ty + 1) * bins.tile_size - 1},
                                            screen);
            if (tile.empty()) continue;
            int live = static_cast<int>(tile.pixel_count());
            for (int gi : bins.tiles[static_cast<size_t>(t)]) {
                if (live == 0) break;  // whole tile terminated
                const ProjectedGaussian& g = projected[static_cast<size_t>(gi)];
                ledger.record(Traffic::Ellipse2d, kEllipseScalars, g.src);  // per-tile re-load
                const PixelBox span = intersect(tile, gaussian_pixel_box(g));
                for (int py = span.y0; py <= span.y1; ++py)
                    for (int px = span.x0; px <= span.x1; ++px) {
                        const size_t idx = static_cast<size_t>(py) * cam.width + px;
                        if (T[idx] < cfg.term_threshold) continue;  // pixel done
                        const float a = alpha_at_pixel(px, py, g, cfg.exp_mode);
                        ++alpha_evals;
                        if (a < cfg.alpha_min) continue;
                        blend_step(T[idx], accum[idx], a, g.color);
                        ++blend_steps;
                        if (T[idx] < cfg.term_threshold) --live;
                    }
            }
            for (int py = tile.y0; py <= tile.y1; ++py)
                for (int px = tile.x0; px <= tile.x1; ++px) {
                    const size_t idx = static_cast<size_t>(py) * cam.width + px;
                    const Vec3f c = accum[idx] + T[idx] * cfg.background;
                    img.rgb[idx] = {std::clamp(c.x, 0.0f, 1.0f), std::clamp(c.y, 0.0f, 1.0f),
                                    std::clamp(c.z, 0.0f, 1.0f)};
                }
        }
        ledger.add_alpha_evals(alpha_evals);
        ledger.add_blend_steps(blend_steps);
    });
    return img;
}

OutputImage render_tile_frame(const GaussianModel& model, const Camera& cam,
                              const RenderConfig& cfg, TrafficLedger& ledger) {
    const auto projected = preprocess_all(model, cam, cfg, ledger);
    const auto bins = bin_to_tiles(projected, cam, cfg, ledger);
    return render_tiles(bins, projected, cam, cfg, ledger);
}

std::vector<CoverageCounts> coverage_counts(const std::vector<ProjectedGaussian>& projected,
                                            const Camera& cam) {
    const PixelBox screen = screen_box(cam.width, cam.height);
    std::vector<CoverageCounts> out(projected.size());
    for (size_t i = 0; i < projected.size(); ++i) {
        const ProjectedGaussian& g = projected[i];
        CoverageCounts& cc = out[i];

        const auto cov = invert_2x2(g.inv_cov);
        if (!cov) continue;
        const auto [l1, l2] = eigenvalues_2x2(*cov);
        const int r3 = radius_three_sigma(l1);

        ProjectedGaussian three_sigma = g;
        three_sigma.radius = r3;
        const PixelBox aabb = intersect(gaussian_pixel_box(three_sigma), screen);
        cc.aabb_px = static_cast<std::uint64_t>(aabb.pixel_count());

        // Pixels with alpha above the display floor, brute force in the square.
        for (int py = aabb.y0; py <= aabb.y1; ++py)
            for (int px = aabb.x0; px <= aabb.x1; ++px)
                if (alpha_at_pixel(px, py, g, ExpMode::Exact) >= 1.0f / 255.0f) ++cc.alpha_px;

        // Oriented 3-sigma rectangle, counted over its own bounding box.
        const Vec2f e1 = eigenvector_2x2(*cov, l1);
        const Vec2f e2{-e1.y, e1.x};
        const float h1 = 3.0f * std::sqrt(std::max(l1, 0.0f));
        const float h2 = 3.0f * std::sqrt(std::max(l2, 0.0f));
        const float ext_x = h1 * std::abs(e1.x) + h2 * std::abs(e2.x);
        const float ext_y = h1 * std::abs(e1.y) + h2 * std::abs(e2.y);
        PixelBox obb_bound{static_cast<int>(std::floor(g.mean2d.x - ext_x)),
                           static_cast<int>(std::floor(g.mean2d.y - ext_y)),
                           static_cast<int>(std::ceil(g.mean2d.x + ext_x)),
                           static_cast<int>(std::ceil(g.mean2d.y + ext_y))};
        obb_bound = intersect(obb_bound, screen);
        for (int py = obb_bound.y0; py <= obb_bound.y1; ++py)
            for (int px = obb_bound.x0; px <= obb_bound.x1; ++px) {
                const Vec2f d{px + 0.5f - g.mean2d.x, py + 0.5f - g.mean2d.y};
                if (std::abs(dot(d, e1)) <= h1 && std::abs(dot(d, e2)) <= h2) ++cc.obb_px;
            }
    }
    return out;
}

}  // namespace splat
