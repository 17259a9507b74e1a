// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace splat {

/// Off-chip traffic categories. Record sizes (in 4-byte scalars) are fixed and
/// documented in the report schema:
///   Gauss3dAttr  59  full attribute record (position, SH, opacity, scale, rotation)
///   GaussPosition 3  position-only read (depth grouping)
///   ShCoeff      48  SH coefficient stream consumed at shading
///   Ellipse2d     8  projected-splat record: mean(2) invcov(3) radius(1) logop(1) depth(1)
///   KvPair        2  (tile, gaussian) binding
///   DepthId       2  depth + id written back after grouping
///   ImageRw       -  framebuffer spill, not modeled (always 0)
enum class Traffic {
    Gauss3dAttr = 0,
    GaussPosition,
    ShCoeff,
    Ellipse2d,
    KvPair,
    DepthId,
    ImageRw,
};
inline constexpr int kTrafficCategories = 7;
inline constexpr std::uint64_t kScalarBytes = 4;

const char* traffic_name(Traffic cat);

struct LoadStats {
    double mean = 0.0;  // over gaussians with at least one load
    std::uint32_t max = 0;
    std::uint64_t loaded_gaussians = 0;
    std::map<std::uint32_t, std::uint64_t> histogram;  // load count -> gaussians
};

/// Plain-value snapshot of a ledger, safe to copy around and serialize.
struct LedgerSnapshot {
    std::array<std::uint64_t, kTrafficCategories> bytes{};
    std::uint64_t projections = 0;
    std::uint64_t sh_evals = 0;
    std::uint64_t alpha_evals = 0;
    std::uint64_t boundary_probes = 0;
    std::uint64_t blend_steps = 0;
    LoadStats load_stats;

    std::uint64_t bytes_total() const;
    std::uint64_t ops_total() const;
};

/// Byte and operation counters for one rendered frame. All mutators are atomic
/// with commutative aggregation, so parallel tile / sub-view workers may share
/// one ledger and totals stay independent of scheduling.
class TrafficLedger {
  public:
    explicit TrafficLedger(std::size_t gaussian_count = 0);

    /// bytes[cat] += scalars * 4. When src >= 0 the per-gaussian load histogram
    /// is bumped as well.
    void record(Traffic cat, std::uint64_t scalars, int src = -1);

    void add_projections(std::uint64_t n) { projections_ += n; }
    void add_sh_evals(std::uint64_t n) { sh_evals_ += n; }
    void add_alpha_evals(std::uint64_t n) { alpha_evals_ += n; }
    void add_boundary_probes(std::uint64_t n) { boundary_probes_ += n; }
    void add_blend_steps(std::uint64_t n) { blend_steps_ += n; }

    std::uint64_t bytes(Traffic cat) const;
    std::uint64_t sh_evals() const { return sh_evals_.load(); }
    std::uint64_t alpha_evals() const { return alpha_evals_.load(); }
    std::uint64_t blend_steps() const { return blend_steps_.load(); }

    LedgerSnapshot snapshot() const;

  private:
    std::array<std::atomic<std::uint64_t>, kTrafficCategories> bytes_{};
    std::atomic<std::uint64_t> projections_{0};
    std::atomic<std::uint64_t> sh_evals_{0};
    std::atomic<std::uint64_t> alpha_evals_{0};
    std::atomic<std::uint64_t> boundary_probes_{0};
    std::atomic<std::uint64_t> blend_steps_{0};
    std::vector<std::atomic<std::uint32_t>> load_counts_;
};

/// Statistics over per-gaussian attribute load counts (mean, max, histogram).
LoadStats per_gaussian_load_stats(const LedgerSnapshot& ledger);

}  // namespace splat
