// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include "splat/report.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "splat/error.hpp"
#include "splat/gaussian.hpp"

namespace splat {

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for hashing: " + path);
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

namespace {

const char* radius_law_name(RadiusLaw law) {
    return law == RadiusLaw::ThreeSigma ? "3sigma" : "opacity";
}
const char* exp_mode_name(ExpMode mode) { return mode == ExpMode::Exact ? "exact" : "lut"; }
const char* boundary_name(BoundaryMode mode) {
    return mode == BoundaryMode::PixelBfs ? "bfs" : "block";
}

}  // namespace

nlohmann::json render_config_json(const RenderConfig& cfg) {
    return {{"tile_size", cfg.tile_size},
            {"radius_law", radius_law_name(cfg.radius_law)},
            {"exp_mode", exp_mode_name(cfg.exp_mode)},
            {"alpha_min", cfg.alpha_min},
            {"term_threshold", cfg.term_threshold},
            {"dilation", cfg.dilation},
            {"background", {cfg.background.x, cfg.background.y, cfg.background.z}},
            {"threads", cfg.threads}};
}

nlohmann::json gaussian_wise_config_json(const GaussianWiseConfig& cfg) {
    nlohmann::json j = render_config_json(cfg.render);
    j["group_cap"] = cfg.group_cap;
    j["depth_threshold"] = cfg.depth_threshold;
    j["block_size"] = cfg.block_size;
    j["boundary_mode"] = boundary_name(cfg.boundary_mode);
    j["initial_bins"] = cfg.initial_bins;
    j["subview_size"] = cfg.subview_size;
    return j;
}

nlohmann::json ledger_json(const LedgerSnapshot& ledger) {
    nlohmann::json bytes;
    for (int i = 0; i < kTrafficCategories; ++i)
        bytes[traffic_name(static_cast<Traffic>(i))] = ledger.bytes[static_cast<size_t>(i)];
    bytes["total"] = ledger.bytes_total();

    nlohmann::json hist;
    for (const auto& [count, n] : ledger.load_stats.histogram) hist[std::to_string(count)] = n;

    return {{"bytes", bytes},
            {"record_scalars",
             {{"gauss3d_attr", 59},
              {"gauss_position", 3},
              {"sh_coeff", 48},
              {"ellipse2d", 8},
              {"kv_pair", 2},
              {"depth_id", 2}}},
            {"ops",
             {{"projections", ledger.projections},
              {"sh_evals", ledger.sh_evals},
              {"alpha_evals", ledger.alpha_evals},
              {"boundary_probes", ledger.boundary_probes},
              {"blend_steps", ledger.blend_steps},
              {"total", ledger.ops_total()}}},
            {"load_stats",
             {{"mean", ledger.load_stats.mean},
              {"max", ledger.load_stats.max},
              {"loaded_gaussians", ledger.load_stats.loaded_gaussians},
              {"histogram", hist}}}};
}

nlohmann::json quality_json(const QualityReport& q) {
    nlohmann::json j;
    j["exact_match"] = q.exact_match;
    if (q.exact_match) {
        j["psnr_db"] = "inf";
    } else {
        j["psnr_db"] = q.psnr;
    }
    j["max_abs_err"] = q.max_abs_err;
    j["pixel_count"] = q.pixel_count;
    return j;
}

void write_json(const nlohmann::json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write report: " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw io_error("write failed: " + path);
}

}  // namespace splat
