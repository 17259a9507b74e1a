// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "splat/error.hpp"
#include "splat/gaussian_pipeline.hpp"
#include "splat/kernels.hpp"
#include "splat/tile_pipeline.hpp"
#include "test_support.hpp"

using namespace splat;
using namespace splat::test;

namespace {

GaussianWiseConfig matched_config() {
    // Mirrors the standard pipeline exactly: fixed radius law, exact exp.
    GaussianWiseConfig cfg;
    cfg.render.radius_law = RadiusLaw::ThreeSigma;
    cfg.render.exp_mode = ExpMode::Exact;
    return cfg;
}

std::vector<GroupMember> concat_members(const std::vector<DepthGroup>& groups) {
    std::vector<GroupMember> all;
    for (const auto& g : groups)
        for (const auto& m : g.members) all.push_back(m);
    return all;
}

}  // namespace

TEST_CASE("depth grouping culls below the visibility threshold and orders near to far") {
    const Camera cam = test_camera();
    GaussianModel model;
    model.gaussians.push_back(gaussian_at({0, 0, 5.0f}, 0.5f, {0.1f, 0.1f, 0.1f}));
    model.gaussians.push_back(gaussian_at({0, 0, 0.1f}, 0.5f, {0.1f, 0.1f, 0.1f}));
    model.gaussians.push_back(gaussian_at({0, 0, 3.0f}, 0.5f, {0.1f, 0.1f, 0.1f}));
    GaussianWiseConfig cfg;
    TrafficLedger ledger(3);
    const auto groups = group_by_depth(model, cam, cfg, ledger);
    const auto all = concat_members(groups);
    REQUIRE(all.size() == 2);
    CHECK(all[0].index == 2);  // depth 3.0 first
    CHECK(all[1].index == 0);
    CHECK(ledger.bytes(Traffic::GaussPosition) == 3ull * 3 * 4);
    CHECK(ledger.bytes(Traffic::DepthId) == 2ull * 2 * 4);
}

TEST_CASE("equal depths still honor the group cap via index splitting") {
    const Camera cam = test_camera();
    GaussianModel model;
    for (int i = 0; i < 1000; ++i)
        model.gaussians.push_back(gaussian_at({0, 0, 4.0f}, 0.5f, {0.1f, 0.1f, 0.1f}));
    GaussianWiseConfig cfg;
    TrafficLedger ledger(1000);
    const auto groups = group_by_depth(model, cam, cfg, ledger);
    size_t total = 0;
    for (const auto& g : groups) {
        CHECK(g.members.size() <= 256);
        total += g.members.size();
    }
    CHECK(total == 1000);
    // Index order must be preserved across the splits.
    const auto all = concat_members(groups);
    for (size_t i = 1; i < all.size(); ++i) REQUIRE(all[i].index > all[i - 1].index);
}

TEST_CASE("group concatenation equals a global stable sort") {
    const Camera cam = test_camera();
    SceneSpec spec = default_scene_spec();
    spec.depth_min = 0.5f;
    spec.depth_max = 30.0f;
    const GaussianModel model = gen_scene(77, 3000, spec);
    GaussianWiseConfig cfg;
    cfg.group_cap = 64;  // force plenty of subdivision
    cfg.initial_bins = 37;
    TrafficLedger ledger(model.count());
    const auto groups = group_by_depth(model, cam, cfg, ledger);
    const auto all = concat_members(groups);

    // Oracle: full sort of the retained set by (depth, index).
    std::vector<GroupMember> expected;
    for (int i = 0; i < model.count(); ++i) {
        const float d = view_transform(model.gaussians[static_cast<size_t>(i)].position, cam).z;
        if (d < cfg.depth_threshold) continue;
        expected.push_back({i, d});
    }
    std::stable_sort(expected.begin(), expected.end(), [](const GroupMember& a, const GroupMember& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.index < b.index;
    });
    REQUIRE(all.size() == expected.size());
    for (size_t i = 0; i < all.size(); ++i) {
        REQUIRE(all[i].index == expected[i].index);
        REQUIRE(all[i].depth == expected[i].depth);
    }
    for (const auto& g : groups) REQUIRE(g.members.size() <= static_cast<size_t>(cfg.group_cap));
}

TEST_CASE("projection stage culls by opacity support and screen bounds") {
    const Camera cam = test_camera();
    GaussianWiseConfig cfg;

    GaussianModel model;
    model.gaussians.push_back(gaussian_at({0, 0, 4}, 1.0f / 255.0f, {0.2f, 0.2f, 0.2f}));
    model.gaussians.push_back(gaussian_at({-300.0f, 0, 2}, 0.9f, {0.1f, 0.1f, 0.1f}));
    model.gaussians.push_back(gaussian_at({0, 0, 4}, 0.9f, {0.2f, 0.2f, 0.2f}));
    TrafficLedger ledger(model.count());
    const auto groups = group_by_depth(model, cam, cfg, ledger);
    std::vector<ProjectedGaussian> all;
    for (const auto& g : groups) {
        auto p = project_group(g, model, cam, cfg, ledger, screen_box(cam.width, cam.height));
        for (auto& x : p) all.push_back(x);
    }
    REQUIRE(all.size() == 1);
    CHECK(all[0].src == 2);
    // Every member of every group was loaded in full exactly once.
    CHECK(ledger.bytes(Traffic::Gauss3dAttr) == 3ull * 59 * 4);
}

TEST_CASE("opacity-aware survivors are a subset of fixed-radius survivors at low opacity") {
    const Camera cam = test_camera();
    SceneSpec spec = default_scene_spec();
    spec.opacity_min = 0.005f;
    spec.opacity_max = 0.34f;  // below the crossover where both laws agree on ordering
    const GaussianModel model = gen_scene(31, 2000, spec);
    const PixelBox screen = screen_box(cam.width, cam.height);
    int checked = 0;
    for (int i = 0; i < model.count(); ++i) {
        const auto& g = model.gaussians[static_cast<size_t>(i)];
        if (view_transform(g.position, cam).z <= cam.znear) continue;
        const auto aware = project_gaussian(g, i, cam, RadiusLaw::OpacityAware, 0.3f, screen);
        const auto fixed = project_gaussian(g, i, cam, RadiusLaw::ThreeSigma, 0.3f, screen);
        if (aware) {
            REQUIRE(fixed.has_value());
            REQUIRE(aware->radius <= fixed->radius);
            ++checked;
        }
    }
    CHECK(checked > 500);
}

TEST_CASE("shading runs only for survivors and sorts by depth then index") {
    const Camera cam = test_camera();
    GaussianWiseConfig cfg;

    // All members culled: no SH work recorded.
    GaussianModel faint;
    faint.gaussians.push_back(gaussian_at({0, 0, 4}, 1.0f / 255.0f, {0.2f, 0.2f, 0.2f}));
    TrafficLedger l1(faint.count());
    const auto groups = group_by_depth(faint, cam, cfg, l1);
    REQUIRE(groups.size() == 1);
    auto projected = project_group(groups[0], faint, cam, cfg, l1, screen_box(256, 256));
    shade_and_sort(projected, faint, cam, cfg, l1);
    CHECK(l1.snapshot().sh_evals == 0);
    CHECK(l1.bytes(Traffic::ShCoeff) == 0);

    // Sorting: depth first, then source index.
    GaussianModel m2;
    m2.gaussians.push_back(gaussian_at({0.1f, 0, 2}, 0.5f, {0.1f, 0.1f, 0.1f}));
    m2.gaussians.push_back(gaussian_at({-0.1f, 0, 1}, 0.5f, {0.1f, 0.1f, 0.1f}));
    TrafficLedger l2(m2.count());
    std::vector<ProjectedGaussian> two;
    for (int i = 0; i < 2; ++i) {
        auto p = project_gaussian(m2.gaussians[static_cast<size_t>(i)], i, cam,
                                  RadiusLaw::OpacityAware, 0.3f, screen_box(256, 256));
        REQUIRE(p.has_value());
        two.push_back(*p);
    }
    shade_and_sort(two, m2, cam, cfg, l2);
    CHECK(two[0].src == 1);  // depth 1 before depth 2
    CHECK(two[1].src == 0);

    ProjectedGaussian t1 = splat_from_cov({10, 10}, {4, 0, 4}, 0.5f, 3.0f, 7);
    ProjectedGaussian t2 = splat_from_cov({10, 10}, {4, 0, 4}, 0.5f, 3.0f, 3);
    GaussianModel m3;
    m3.gaussians.resize(8, gaussian_at({0, 0, 3}, 0.5f, {0.1f, 0.1f, 0.1f}));
    std::vector<ProjectedGaussian> tie{t1, t2};
    TrafficLedger l3(m3.count());
    shade_and_sort(tie, m3, cam, cfg, l3);
    CHECK(tie[0].src == 3);
    CHECK(tie[1].src == 7);
}

TEST_CASE("block masks flip after enough opaque layers and stop further work") {
    GaussianWiseConfig cfg;
    TrafficLedger ledger(8);

    FrameBuffer fb(0, 0, 32, 32, 8);
    // Footprint flat enough that alpha clamps at 0.99 on every frame pixel.
    ProjectedGaussian wall = splat_from_cov({16.0f, 16.0f}, {200000, 0, 200000}, 0.9999f, 1.0f, 0);
    wall.log_opacity = 0.0f;

    // Oracle: the direct transmittance recurrence decides how many clamped
    // layers push T strictly below the termination threshold.
    int layers_needed = 0;
    for (float T = 1.0f; T >= cfg.render.term_threshold; ++layers_needed) T *= 1.0f - 0.99f;

    for (int i = 0; i < layers_needed - 1; ++i) blend_gaussian(wall, fb, cfg, ledger);
    CHECK(!fb.block_masked(1, 1));
    CHECK(!fb.all_masked());
    blend_gaussian(wall, fb, cfg, ledger);
    CHECK(fb.block_masked(1, 1));
    CHECK(fb.all_masked());

    // A masked frame receives no further alpha evaluations.
    const auto before = ledger.snapshot();
    blend_gaussian(wall, fb, cfg, ledger);
    const auto after = ledger.snapshot();
    CHECK(after.alpha_evals == before.alpha_evals);
    CHECK(after.blend_steps == before.blend_steps);
}

TEST_CASE("gaussian-wise render is bit-identical to the tile renderer under matched config") {
    for (std::uint64_t seed : {101ull, 202ull, 303ull}) {
        const Camera cam = test_camera();
        const GaussianModel model = gen_scene(seed, 1200, default_scene_spec());

        RenderConfig tile_cfg;  // defaults: fixed radius, exact exp
        TrafficLedger tl(model.count());
        const OutputImage tile_img = render_tile_frame(model, cam, tile_cfg, tl);

        TrafficLedger gl(model.count());
        const OutputImage gw_img = render_gaussian_wise(model, cam, matched_config(), gl);

        REQUIRE(images_identical(tile_img, gw_img));
        // Same pixels blended, in the same order.
        CHECK(tl.blend_steps() == gl.blend_steps());
    }
}

TEST_CASE("matched pipelines agree under a rotated, translated camera") {
    // 30 degrees about y plus a translation; the scene is generated inside
    // this camera's own frustum.
    Camera cam = test_camera();
    const float c30 = std::cos(0.5236f), s30 = std::sin(0.5236f);
    cam.rot.m = {c30, 0, s30, 0, 1, 0, -s30, 0, c30};
    cam.trans = {0.4f, -0.7f, 1.2f};
    validate_camera(cam);

    SceneSpec spec = default_scene_spec();
    spec.camera = cam;
    const GaussianModel model = gen_scene(606, 1000, spec);

    RenderConfig tile_cfg;
    TrafficLedger tl(model.count());
    const OutputImage tile_img = render_tile_frame(model, cam, tile_cfg, tl);
    TrafficLedger gl(model.count());
    const OutputImage gw_img = render_gaussian_wise(model, cam, matched_config(), gl);
    CHECK(images_identical(tile_img, gw_img));

    // The scene must actually land on screen for this to mean anything.
    std::uint64_t lit = 0;
    for (const auto& p : tile_img.rgb)
        if (p.x + p.y + p.z > 0.01f) ++lit;
    CHECK(lit > 1000);
}

TEST_CASE("matched pipelines agree in table-exponential mode") {
    const Camera cam = test_camera();
    const GaussianModel model = gen_scene(707, 1000, default_scene_spec());

    RenderConfig tile_cfg;
    tile_cfg.exp_mode = ExpMode::Lut;
    TrafficLedger tl(model.count());
    const OutputImage tile_img = render_tile_frame(model, cam, tile_cfg, tl);

    GaussianWiseConfig gw_cfg = matched_config();
    gw_cfg.render.exp_mode = ExpMode::Lut;
    TrafficLedger gl(model.count());
    const OutputImage gw_img = render_gaussian_wise(model, cam, gw_cfg, gl);

    CHECK(images_identical(tile_img, gw_img));
    CHECK(tl.blend_steps() == gl.blend_steps());
}

TEST_CASE("pixel-bfs mode matches the tile renderer when both use the opacity law") {
    const Camera cam = test_camera();
    SceneSpec spec = default_scene_spec();
    spec.opacity_min = 0.2f;  // comfortably thick footprints
    const GaussianModel model = gen_scene(404, 800, spec);

    RenderConfig tile_cfg;
    tile_cfg.radius_law = RadiusLaw::OpacityAware;
    TrafficLedger tl(model.count());
    const OutputImage tile_img = render_tile_frame(model, cam, tile_cfg, tl);

    GaussianWiseConfig cfg;
    cfg.boundary_mode = BoundaryMode::PixelBfs;
    TrafficLedger gl(model.count());
    const OutputImage gw_img = render_gaussian_wise(model, cam, cfg, gl);

    CHECK(images_identical(tile_img, gw_img));
    CHECK(tl.blend_steps() == gl.blend_steps());
}

TEST_CASE("an opaque near wall skips the far groups entirely") {
    const Camera cam = test_camera();
    const GaussianModel model = occluder_scene(cam, 6, 4000, 9);
    const int wall_count = model.count() - 4000;

    RenderConfig tile_cfg;
    TrafficLedger tl(model.count());
    (void)render_tile_frame(model, cam, tile_cfg, tl);

    GaussianWiseConfig cfg;
    TrafficLedger gl(model.count());
    (void)render_gaussian_wise(model, cam, cfg, gl);

    // Baseline shades everything; the conditional pipeline stops at the wall.
    CHECK(tl.snapshot().sh_evals == static_cast<std::uint64_t>(model.count()));
    CHECK(gl.snapshot().sh_evals <= static_cast<std::uint64_t>(wall_count) + 256);
    CHECK(gl.bytes(Traffic::Gauss3dAttr) < tl.bytes(Traffic::Gauss3dAttr));
}

TEST_CASE("an empty model yields no groups and a background frame") {
    const Camera cam = test_camera(32, 32);
    const GaussianModel empty;
    GaussianWiseConfig cfg;
    cfg.render.background = {0.1f, 0.2f, 0.3f};
    TrafficLedger ledger(0);
    CHECK(group_by_depth(empty, cam, cfg, ledger).empty());
    const OutputImage img = render_gaussian_wise(empty, cam, cfg, ledger);
    CHECK(img.at(0, 0).y == doctest::Approx(0.2f));
    CHECK(img.at(31, 31).z == doctest::Approx(0.3f));
}

TEST_CASE("a transparent scene processes every group") {
    const Camera cam = test_camera(64, 64);
    SceneSpec spec = default_scene_spec(64, 64);
    spec.opacity_min = 0.005f;
    spec.opacity_max = 0.02f;
    const GaussianModel model = gen_scene(5, 400, spec);
    GaussianWiseConfig cfg;
    TrafficLedger ledger(model.count());
    const OutputImage img = render_gaussian_wise(model, cam, cfg, ledger);
    // Every retained gaussian was loaded (none skipped by the cross-stage cut).
    CHECK(ledger.bytes(Traffic::Gauss3dAttr) == static_cast<std::uint64_t>(model.count()) * 59 * 4);
    // Image stays close to the black background.
    float max_v = 0.0f;
    for (const auto& p : img.rgb) max_v = std::max({max_v, p.x, p.y, p.z});
    CHECK(max_v < 0.5f);
}

TEST_CASE("sub-view rendering: single sub-view is ledger- and image-identical") {
    const Camera cam = test_camera();
    const GaussianModel model = gen_scene(42, 1000, default_scene_spec());

    GaussianWiseConfig full;
    TrafficLedger lf(model.count());
    const OutputImage a = render_gaussian_wise(model, cam, full, lf);

    GaussianWiseConfig sub = full;
    sub.subview_size = 256;
    TrafficLedger ls(model.count());
    const OutputImage b = render_subviews(model, cam, sub, ls);

    CHECK(subview_count(cam, sub) == 1);
    CHECK(images_identical(a, b));
    const auto sf = lf.snapshot();
    const auto ss = ls.snapshot();
    for (int c = 0; c < kTrafficCategories; ++c)
        CHECK(sf.bytes[static_cast<size_t>(c)] == ss.bytes[static_cast<size_t>(c)]);
    CHECK(sf.sh_evals == ss.sh_evals);
    CHECK(sf.alpha_evals == ss.alpha_evals);
    CHECK(sf.blend_steps == ss.blend_steps);
}

TEST_CASE("sub-view rendering is bit-identical and loads grow as views shrink") {
    const Camera cam = test_camera();
    const GaussianModel model = gen_scene(43, 1500, default_scene_spec());

    GaussianWiseConfig full;
    TrafficLedger lf(model.count());
    const OutputImage reference = render_gaussian_wise(model, cam, full, lf);

    std::uint64_t prev_bytes = lf.bytes(Traffic::Gauss3dAttr);
    for (int s : {128, 64, 32, 16}) {
        GaussianWiseConfig cfg;
        cfg.subview_size = s;
        TrafficLedger ledger(model.count());
        const OutputImage img = render_subviews(model, cam, cfg, ledger);
        REQUIRE(images_identical(reference, img));
        const std::uint64_t bytes = ledger.bytes(Traffic::Gauss3dAttr);
        REQUIRE(bytes >= prev_bytes);
        prev_bytes = bytes;
    }
}

TEST_CASE("sub-view sizes that do not divide the frame still match") {
    const Camera cam = test_camera();
    const GaussianModel model = gen_scene(44, 900, default_scene_spec());
    GaussianWiseConfig full;
    TrafficLedger lf(model.count());
    const OutputImage reference = render_gaussian_wise(model, cam, full, lf);

    GaussianWiseConfig cfg;
    cfg.subview_size = 100;  // 3x3 grid with ragged edges
    TrafficLedger ledger(model.count());
    const OutputImage img = render_subviews(model, cam, cfg, ledger);
    CHECK(subview_count(cam, cfg) == 9);
    CHECK(images_identical(reference, img));
}

TEST_CASE("sub-view size below the block size is rejected") {
    const Camera cam = test_camera();
    const GaussianModel model = gen_scene(1, 10, default_scene_spec());
    GaussianWiseConfig cfg;
    cfg.subview_size = 4;
    TrafficLedger ledger(model.count());
    CHECK_THROWS_AS(render_subviews(model, cam, cfg, ledger), validation_error);
}

TEST_CASE("gaussian-wise rendering is thread-count independent") {
    const Camera cam = test_camera();
    const GaussianModel model = gen_scene(8, 1200, default_scene_spec());
    GaussianWiseConfig cfg;
    cfg.subview_size = 64;
    TrafficLedger l1(model.count());
    const OutputImage a = render_subviews(model, cam, cfg, l1);

    GaussianWiseConfig cfg8 = cfg;
    cfg8.render.threads = 8;
    TrafficLedger l2(model.count());
    const OutputImage b = render_subviews(model, cam, cfg8, l2);

    CHECK(images_identical(a, b));
    CHECK(l1.snapshot().bytes_total() == l2.snapshot().bytes_total());
    CHECK(l1.snapshot().alpha_evals == l2.snapshot().alpha_evals);
}
