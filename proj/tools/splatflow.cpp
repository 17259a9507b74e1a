// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: render a model with either pipeline, compare the two,
// emit coverage/traffic statistics, sweep the bandwidth cost model, and
// generate synthetic scenes.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "splat/camera.hpp"
#include "splat/config.hpp"
#include "splat/cost_model.hpp"
#include "splat/error.hpp"
#include "splat/gaussian_pipeline.hpp"
#include "splat/image.hpp"
#include "splat/ledger.hpp"
#include "splat/metrics.hpp"
#include "splat/model_io.hpp"
#include "splat/report.hpp"
#include "splat/scene_gen.hpp"
#include "splat/tile_pipeline.hpp"

namespace {

using nlohmann::json;
using namespace splat;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Flags {
    std::string model_path;
    std::string cameras_path;
    int camera_index = 0;

    std::string pipeline = "tile";
    std::string out;
    std::string out_tile;
    std::string out_gaussian;
    std::string report;
    std::string csv;

    // Shared render knobs; radius_law empty means "pipeline default".
    int tile_size = 16;
    std::string radius_law;
    std::string exp_mode = "exact";
    float alpha_min = 1.0f / 255.0f;
    float term_threshold = 1e-4f;
    float dilation = 0.3f;
    std::vector<float> background{0.0f, 0.0f, 0.0f};
    int threads = 1;

    // Gaussian-wise knobs.
    int group_cap = 256;
    float depth_threshold = 0.2f;
    int block_size = 8;
    std::string boundary = "block";
    int bins = 1024;
    int subview = 0;

    // Sweep.
    std::vector<double> bandwidths;
    double compute_rate = 1e9;

    // Scene generation.
    std::uint64_t seed = 1;
    int n = 0;
    int width = 256;
    int height = 256;
    float focal = 200.0f;
    float znear = 0.2f;
    std::vector<float> depth_range{2.0f, 12.0f};
    std::vector<float> opacity_range{0.05f, 0.95f};
    std::vector<float> scale_range{0.03f, 0.25f};
    float margin = 0.9f;
    std::string cameras_out;
    std::string manifest;
};

RadiusLaw parse_radius_law(const std::string& s, RadiusLaw fallback) {
    if (s.empty()) return fallback;
    return s == "3sigma" ? RadiusLaw::ThreeSigma : RadiusLaw::OpacityAware;
}

RenderConfig tile_config(const Flags& f) {
    RenderConfig cfg;
    cfg.tile_size = f.tile_size;
    cfg.radius_law = parse_radius_law(f.radius_law, RadiusLaw::ThreeSigma);
    cfg.exp_mode = f.exp_mode == "lut" ? ExpMode::Lut : ExpMode::Exact;
    cfg.alpha_min = f.alpha_min;
    cfg.term_threshold = f.term_threshold;
    cfg.dilation = f.dilation;
    cfg.background = {f.background[0], f.background[1], f.background[2]};
    cfg.threads = f.threads;
    return cfg;
}

GaussianWiseConfig gaussian_config(const Flags& f) {
    GaussianWiseConfig cfg;
    cfg.render = tile_config(f);
    cfg.render.radius_law = parse_radius_law(f.radius_law, RadiusLaw::OpacityAware);
    cfg.group_cap = f.group_cap;
    cfg.depth_threshold = f.depth_threshold;
    cfg.block_size = f.block_size;
    cfg.boundary_mode = f.boundary == "bfs" ? BoundaryMode::PixelBfs : BoundaryMode::BlockOctant;
    cfg.initial_bins = f.bins;
    cfg.subview_size = f.subview;
    return cfg;
}

struct LoadedInputs {
    GaussianModel model;
    Camera camera;
    json inputs_json;
};

LoadedInputs load_inputs(const Flags& f) {
    LoadedInputs in;
    try {
        in.model = load_model(f.model_path);
    } catch (const std::exception& e) {
        throw io_error(std::string("model load failed: ") + e.what());
    }
    std::vector<Camera> cams;
    try {
        cams = load_cameras(f.cameras_path);
    } catch (const std::exception& e) {
        throw io_error(std::string("camera load failed: ") + e.what());
    }
    if (f.camera_index < 0 || static_cast<size_t>(f.camera_index) >= cams.size())
        throw io_error("camera index out of range");
    in.camera = cams[static_cast<size_t>(f.camera_index)];
    in.inputs_json = {{"model", {{"path", f.model_path}, {"fnv1a64", file_digest(f.model_path)}}},
                      {"cameras",
                       {{"path", f.cameras_path}, {"fnv1a64", file_digest(f.cameras_path)}}},
                      {"camera_index", f.camera_index}};
    return in;
}

struct FrameResult {
    OutputImage image;
    LedgerSnapshot ledger;
    int subviews = 1;
};

FrameResult run_pipeline(const std::string& pipeline, const GaussianModel& model,
                         const Camera& cam, const Flags& f) {
    FrameResult r;
    TrafficLedger ledger(static_cast<size_t>(model.count()));
    if (pipeline == "tile") {
        r.image = render_tile_frame(model, cam, tile_config(f), ledger);
    } else {
        const GaussianWiseConfig cfg = gaussian_config(f);
        r.subviews = subview_count(cam, cfg);
        r.image = cfg.subview_size > 0 ? render_subviews(model, cam, cfg, ledger)
                                       : render_gaussian_wise(model, cam, cfg, ledger);
    }
    r.ledger = ledger.snapshot();
    return r;
}

json config_json_for(const std::string& pipeline, const Flags& f) {
    if (pipeline == "tile") return render_config_json(tile_config(f));
    return gaussian_wise_config_json(gaussian_config(f));
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

int cmd_render(const Flags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const LoadedInputs in = load_inputs(f);
    const FrameResult r = run_pipeline(f.pipeline, in.model, in.camera, f);
    try {
        write_image(r.image, f.out);
    } catch (const std::exception& e) {
        throw io_error(std::string("image write failed: ") + e.what());
    }

    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["command"] = "render";
    doc["pipeline"] = f.pipeline;
    doc["config"] = config_json_for(f.pipeline, f);
    doc["inputs"] = in.inputs_json;
    doc["outputs"] = {{"image", f.out}};
    doc["subviews"] = r.subviews;
    doc["ledger"] = ledger_json(r.ledger);
    doc["wall_time_ms"] = elapsed_ms(t0);
    const std::string report = f.report.empty() ? f.out + ".report.json" : f.report;
    write_json(doc, report);
    return kExitOk;
}

int cmd_compare(const Flags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const LoadedInputs in = load_inputs(f);
    const FrameResult tile = run_pipeline("tile", in.model, in.camera, f);
    const FrameResult gw = run_pipeline("gaussian", in.model, in.camera, f);
    if (!f.out_tile.empty()) write_image(tile.image, f.out_tile);
    if (!f.out_gaussian.empty()) write_image(gw.image, f.out_gaussian);

    const QualityReport q = psnr(tile.image, gw.image);
    const auto savings = unused_preprocess_fraction(tile.ledger, gw.ledger);

    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["command"] = "compare";
    doc["configs"] = {{"tile", config_json_for("tile", f)},
                      {"gaussian", config_json_for("gaussian", f)}};
    doc["inputs"] = in.inputs_json;
    doc["quality"] = quality_json(q);
    doc["ledgers"] = {{"tile", ledger_json(tile.ledger)}, {"gaussian", ledger_json(gw.ledger)}};
    doc["deltas"] = {
        {"bytes_total",
         static_cast<std::int64_t>(tile.ledger.bytes_total()) -
             static_cast<std::int64_t>(gw.ledger.bytes_total())},
        {"sh_evals", static_cast<std::int64_t>(tile.ledger.sh_evals) -
                         static_cast<std::int64_t>(gw.ledger.sh_evals)},
        {"alpha_evals", static_cast<std::int64_t>(tile.ledger.alpha_evals) -
                            static_cast<std::int64_t>(gw.ledger.alpha_evals)},
        {"blend_steps", static_cast<std::int64_t>(tile.ledger.blend_steps) -
                            static_cast<std::int64_t>(gw.ledger.blend_steps)}};
    if (savings) {
        doc["preprocess_savings"] = {{"unused_fraction", savings->unused_fraction},
                                     {"sh_bytes_saved", savings->sh_bytes_saved}};
    } else {
        doc["preprocess_savings"] = nullptr;
    }
    json outs = json::object();
    if (!f.out_tile.empty()) outs["tile"] = f.out_tile;
    if (!f.out_gaussian.empty()) outs["gaussian"] = f.out_gaussian;
    doc["outputs"] = outs;
    doc["wall_time_ms"] = elapsed_ms(t0);
    write_json(doc, f.report);

    std::cout << (q.exact_match ? "images: exact match\n"
                                : "psnr_db: " + std::to_string(q.psnr) + "\n");
    return kExitOk;
}

int cmd_stats(const Flags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const LoadedInputs in = load_inputs(f);
    const RenderConfig cfg = tile_config(f);

    TrafficLedger ledger(static_cast<size_t>(in.model.count()));
    const auto projected = preprocess_all(in.model, in.camera, cfg, ledger);
    const auto counts = coverage_counts(projected, in.camera);
    CoverageTotals totals;
    totals.gaussians = counts.size();
    for (const auto& c : counts) {
        totals.aabb_px += c.aabb_px;
        totals.obb_px += c.obb_px;
        totals.alpha_px += c.alpha_px;
    }
    // Load-count histogram comes from a full tile-pipeline render.
    const auto bins = bin_to_tiles(projected, in.camera, cfg, ledger);
    (void)render_tiles(bins, projected, in.camera, cfg, ledger);

    if (!f.csv.empty()) {
        std::ofstream csv(f.csv);
        if (!csv) throw io_error("cannot write csv: " + f.csv);
        csv << "gaussian,aabb_px,obb_px,alpha_px\n";
        for (size_t i = 0; i < counts.size(); ++i)
            csv << projected[i].src << "," << counts[i].aabb_px << "," << counts[i].obb_px << ","
                << counts[i].alpha_px << "\n";
    }

    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["command"] = "stats";
    doc["config"] = render_config_json(cfg);
    doc["inputs"] = in.inputs_json;
    doc["coverage"] = {{"aabb_px", totals.aabb_px},
                       {"obb_px", totals.obb_px},
                       {"alpha_px", totals.alpha_px},
                       {"gaussians", totals.gaussians}};
    doc["ledger"] = ledger_json(ledger.snapshot());
    if (!f.csv.empty()) doc["outputs"] = {{"csv", f.csv}};
    doc["wall_time_ms"] = elapsed_ms(t0);
    write_json(doc, f.report);
    return kExitOk;
}

int cmd_sweep(const Flags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const LoadedInputs in = load_inputs(f);
    const FrameResult tile = run_pipeline("tile", in.model, in.camera, f);
    const FrameResult gw = run_pipeline("gaussian", in.model, in.camera, f);

    const auto rows = sweep_bandwidth({tile.ledger, gw.ledger}, f.compute_rate, f.bandwidths);
    // The roofline estimate must be non-increasing in bandwidth.
    for (size_t i = 1; i < rows.size(); ++i)
        for (size_t p = 0; p < rows[i].est_time.size(); ++p)
            if (rows[i - 1].bandwidth < rows[i].bandwidth &&
                rows[i].est_time[p] > rows[i - 1].est_time[p] + 1e-12)
                throw validation_error("sweep produced a non-monotone estimate");

    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["command"] = "sweep";
    doc["configs"] = {{"tile", config_json_for("tile", f)},
                      {"gaussian", config_json_for("gaussian", f)}};
    doc["inputs"] = in.inputs_json;
    doc["compute_rate"] = f.compute_rate;
    auto& out_rows = doc["rows"] = json::array();
    std::cout << "bandwidth_Bps  tile_s  gaussian_s\n";
    for (const auto& row : rows) {
        out_rows.push_back({{"bandwidth", row.bandwidth},
                            {"tile_s", row.est_time[0]},
                            {"gaussian_s", row.est_time[1]}});
        std::cout << row.bandwidth << "  " << row.est_time[0] << "  " << row.est_time[1] << "\n";
    }
    doc["bytes_total"] = {{"tile", tile.ledger.bytes_total()},
                          {"gaussian", gw.ledger.bytes_total()}};
    doc["ops_total"] = {{"tile", tile.ledger.ops_total()}, {"gaussian", gw.ledger.ops_total()}};
    doc["wall_time_ms"] = elapsed_ms(t0);
    write_json(doc, f.report);
    return kExitOk;
}

int cmd_gen_scene(const Flags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    SceneSpec spec;
    spec.camera = make_camera(f.width, f.height, f.focal, f.focal, f.width * 0.5f,
                              f.height * 0.5f, f.znear);
    spec.depth_min = f.depth_range[0];
    spec.depth_max = f.depth_range[1];
    spec.opacity_min = f.opacity_range[0];
    spec.opacity_max = f.opacity_range[1];
    spec.scale_min = f.scale_range[0];
    spec.scale_max = f.scale_range[1];
    spec.margin = f.margin;

    const GaussianModel model = gen_scene(f.seed, f.n, spec);
    save_model(model, f.out);
    if (!f.cameras_out.empty()) save_cameras({spec.camera}, f.cameras_out);

    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["command"] = "gen-scene";
    doc["seed"] = f.seed;
    doc["n"] = f.n;
    doc["spec"] = {{"width", f.width},
                   {"height", f.height},
                   {"focal", f.focal},
                   {"znear", f.znear},
                   {"depth_range", {spec.depth_min, spec.depth_max}},
                   {"opacity_range", {spec.opacity_min, spec.opacity_max}},
                   {"scale_range", {spec.scale_min, spec.scale_max}},
                   {"margin", spec.margin}};
    json outs = {{"model", f.out}};
    if (!f.cameras_out.empty()) outs["cameras"] = f.cameras_out;
    doc["outputs"] = outs;
    doc["digests"] = {{"model", file_digest(f.out)}};
    doc["wall_time_ms"] = elapsed_ms(t0);
    const std::string manifest = f.manifest.empty() ? f.out + ".manifest.json" : f.manifest;
    write_json(doc, manifest);
    return kExitOk;
}

void add_shared_model_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--model", f.model_path, "Model file")->required();
    cmd->add_option("--cameras", f.cameras_path, "Camera file (JSON)")->required();
    cmd->add_option("--camera-index", f.camera_index, "Camera to use from the file")
        ->capture_default_str();
}

void add_render_flags(CLI::App* cmd, Flags& f, bool with_gaussian_knobs) {
    cmd->add_option("--tile-size", f.tile_size, "Tile edge in pixels")->capture_default_str();
    cmd->add_option("--radius-law", f.radius_law,
                    "Footprint radius law (default: 3sigma for tile, opacity for gaussian)")
        ->check(CLI::IsMember({"3sigma", "opacity"}))
        ->default_str("auto");
    cmd->add_option("--exp", f.exp_mode, "Exponential evaluation")
        ->check(CLI::IsMember({"exact", "lut"}))
        ->capture_default_str();
    cmd->add_option("--alpha-min", f.alpha_min, "Minimum displayable alpha")
        ->capture_default_str();
    cmd->add_option("--term-threshold", f.term_threshold, "Early-termination transmittance")
        ->capture_default_str();
    cmd->add_option("--dilation", f.dilation, "2D covariance diagonal dilation")
        ->capture_default_str();
    cmd->add_option("--background", f.background, "Background RGB")
        ->expected(3)
        ->capture_default_str();
    cmd->add_option("--threads", f.threads, "Worker threads")->capture_default_str();
    if (with_gaussian_knobs) {
        cmd->add_option("--group-cap", f.group_cap, "Depth-group capacity")->capture_default_str();
        cmd->add_option("--depth-threshold", f.depth_threshold, "Visibility depth threshold")
            ->capture_default_str();
        cmd->add_option("--block-size", f.block_size, "Pixel-block edge")->capture_default_str();
        cmd->add_option("--boundary", f.boundary, "Boundary identification mode")
            ->check(CLI::IsMember({"block", "bfs"}))
            ->capture_default_str();
        cmd->add_option("--bins", f.bins, "Initial depth bins")->capture_default_str();
        cmd->add_option("--subview", f.subview,
                        "Sub-view edge in pixels (0 renders the full frame; 128 is the usual "
                        "constrained-buffer setting)")
            ->capture_default_str();
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"splatflow: instrumented 3D gaussian splatting renderer with tile-wise and "
                 "gaussian-wise dataflows"};
    app.require_subcommand(1);
    Flags f;

    auto* render = app.add_subcommand("render", "Render one frame and write image + report");
    add_shared_model_flags(render, f);
    render->add_option("--pipeline", f.pipeline, "Dataflow to run")
        ->required()
        ->check(CLI::IsMember({"tile", "gaussian"}));
    render->add_option("--out", f.out, "Output image (.ppm or .png)")->required();
    render->add_option("--report", f.report, "Report path (default: <out>.report.json)");
    add_render_flags(render, f, true);

    auto* compare = app.add_subcommand("compare", "Run both pipelines and compare");
    add_shared_model_flags(compare, f);
    compare->add_option("--report", f.report, "Report path")->required();
    compare->add_option("--out-tile", f.out_tile, "Optional tile-pipeline image");
    compare->add_option("--out-gaussian", f.out_gaussian, "Optional gaussian-pipeline image");
    add_render_flags(compare, f, true);

    auto* stats = app.add_subcommand("stats", "Coverage and load statistics");
    add_shared_model_flags(stats, f);
    stats->add_option("--report", f.report, "Report path")->required();
    stats->add_option("--csv", f.csv, "Optional per-gaussian CSV");
    add_render_flags(stats, f, false);

    auto* sweep = app.add_subcommand("sweep", "Roofline bandwidth sweep over both pipelines");
    add_shared_model_flags(sweep, f);
    sweep->add_option("--report", f.report, "Report path")->required();
    sweep->add_option("--bandwidths", f.bandwidths, "Bandwidths in bytes/s")
        ->required()
        ->check(CLI::PositiveNumber);
    sweep->add_option("--compute-rate", f.compute_rate, "Compute rate in ops/s")
        ->capture_default_str();
    add_render_flags(sweep, f, true);

    auto* gen = app.add_subcommand("gen-scene", "Generate a deterministic synthetic scene");
    gen->add_option("--seed", f.seed, "RNG seed")->capture_default_str();
    gen->add_option("--n", f.n, "Number of gaussians")->required()->check(CLI::PositiveNumber);
    gen->add_option("--out", f.out, "Output model file")->required();
    gen->add_option("--cameras-out", f.cameras_out, "Also write the matching camera file");
    gen->add_option("--manifest", f.manifest, "Manifest path (default: <out>.manifest.json)");
    gen->add_option("--width", f.width, "Image width")->capture_default_str();
    gen->add_option("--height", f.height, "Image height")->capture_default_str();
    gen->add_option("--focal", f.focal, "Focal length in pixels")->capture_default_str();
    gen->add_option("--znear", f.znear, "Near plane")->capture_default_str();
    gen->add_option("--depth-range", f.depth_range, "Camera-space depth range")
        ->expected(2)
        ->capture_default_str();
    gen->add_option("--opacity-range", f.opacity_range, "Opacity range")
        ->expected(2)
        ->capture_default_str();
    gen->add_option("--scale-range", f.scale_range, "World-unit scale range")
        ->expected(2)
        ->capture_default_str();
    gen->add_option("--margin", f.margin, "Fraction of the image rect used for placement")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (render->parsed()) return cmd_render(f);
        if (compare->parsed()) return cmd_compare(f);
        if (stats->parsed()) return cmd_stats(f);
        if (sweep->parsed()) return cmd_sweep(f);
        if (gen->parsed()) return cmd_gen_scene(f);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
