// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include "splat/metrics.hpp"

#include <cmath>
#include <limits>

#include "splat/error.hpp"
#include "splat/ledger.hpp"

namespace splat {

QualityReport psnr(const OutputImage& a, const OutputImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw validation_error("psnr: image dimensions differ");
    QualityReport q;
    q.pixel_count = static_cast<std::uint64_t>(a.width) * static_cast<std::uint64_t>(a.height);
    double sq = 0.0;
    for (size_t i = 0; i < a.rgb.size(); ++i) {
        const double d[3] = {static_cast<double>(a.rgb[i].x) - b.rgb[i].x,
                             static_cast<double>(a.rgb[i].y) - b.rgb[i].y,
                             static_cast<double>(a.rgb[i].z) - b.rgb[i].z};
        for (double e : d) {
            sq += e * e;
            q.max_abs_err = std::max(q.max_abs_err, std::abs(e));
        }
    }
    const double mse = sq / (3.0 * static_cast<double>(q.pixel_count));
    if (mse == 0.0) {
        q.exact_match = true;
        q.psnr = std::numeric_limits<double>::infinity();
    } else {
        q.psnr = 10.0 * std::log10(1.0 / mse);
    }
    return q;
}

CoverageTotals coverage_report(const GaussianModel& model, const Camera& cam,
                               const RenderConfig& cfg) {
    TrafficLedger scratch(static_cast<size_t>(model.count()));
    const auto projected = preprocess_all(model, cam, cfg, scratch);
    const auto counts = coverage_counts(projected, cam);
    CoverageTotals totals;
    totals.gaussians = counts.size();
    for (const auto& c : counts) {
        totals.aabb_px += c.aabb_px;
        totals.obb_px += c.obb_px;
        totals.alpha_px += c.alpha_px;
    }
    return totals;
}

}  // namespace splat
