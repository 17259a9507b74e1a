// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include "splat/cost_model.hpp"

#include <algorithm>
#include <stdexcept>

#include "splat/gaussian.hpp"

namespace splat {

CostEstimate estimate_cost(const LedgerSnapshot& ledger, double compute_rate, double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::domain_error("bandwidth must be positive");
    if (!(compute_rate > 0.0)) throw std::domain_error("compute rate must be positive");
    CostEstimate e;
    e.bytes_total = static_cast<double>(ledger.bytes_total());
    e.ops_total = static_cast<double>(ledger.ops_total());
    e.est_time = std::max(e.ops_total / compute_rate, e.bytes_total / bandwidth);
    return e;
}

std::optional<PreprocessSavings> unused_preprocess_fraction(const LedgerSnapshot& baseline,
                                                            const LedgerSnapshot& gaussian_wise) {
    if (baseline.sh_evals == 0) return std::nullopt;
    PreprocessSavings s;
    s.unused_fraction = 1.0 - static_cast<double>(gaussian_wise.sh_evals) /
                                  static_cast<double>(baseline.sh_evals);
    const std::uint64_t saved_evals =
        baseline.sh_evals > gaussian_wise.sh_evals ? baseline.sh_evals - gaussian_wise.sh_evals : 0;
    s.sh_bytes_saved = saved_evals * kShCoeffs * kScalarBytes;
    return s;
}

std::vector<SweepRow> sweep_bandwidth(const std::vector<LedgerSnapshot>& ledgers,
                                      double compute_rate, const std::vector<double>& bandwidths) {
    std::vector<SweepRow> rows;
    rows.reserve(bandwidths.size());
    for (double bw : bandwidths) {
        SweepRow row;
        row.bandwidth = bw;
        for (const auto& l : ledgers) row.est_time.push_back(estimate_cost(l, compute_rate, bw).est_time);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace splat
