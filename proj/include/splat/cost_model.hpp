// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "splat/ledger.hpp"

namespace splat {

/// Roofline-style estimate: whichever of compute or traffic dominates.
struct CostEstimate {
    double bytes_total = 0.0;
    double ops_total = 0.0;
    double est_time = 0.0;  // max(ops/compute_rate, bytes/bandwidth)
};

CostEstimate estimate_cost(const LedgerSnapshot& ledger, double compute_rate, double bandwidth);

/// Fraction of baseline SH evaluations the conditional pipeline never ran,
/// 1 - gw_sh_evals / base_sh_evals, plus the byte saving at 48 scalars each.
/// nullopt when the baseline ran no SH work.
struct PreprocessSavings {
    double unused_fraction = 0.0;
    std::uint64_t sh_bytes_saved = 0;
};
std::optional<PreprocessSavings> unused_preprocess_fraction(const LedgerSnapshot& baseline,
                                                            const LedgerSnapshot& gaussian_wise);

struct SweepRow {
    double bandwidth = 0.0;
    std::vector<double> est_time;  // one entry per pipeline, ledger order
};

/// est_time per (pipeline, bandwidth); non-increasing in bandwidth and flat
/// once compute-bound. Throws std::domain_error on a non-positive bandwidth.
std::vector<SweepRow> sweep_bandwidth(const std::vector<LedgerSnapshot>& ledgers,
                                      double compute_rate, const std::vector<double>& bandwidths);

}  // namespace splat
