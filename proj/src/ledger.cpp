// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include "splat/ledger.hpp"

#include <algorithm>
#include <cassert>

namespace splat {

const char* traffic_name(Traffic cat) {
    switch (cat) {
        case Traffic::Gauss3dAttr: return "gauss3d_attr";
        case Traffic::GaussPosition: return "gauss_position";
        case Traffic::ShCoeff: return "sh_coeff";
        case Traffic::Ellipse2d: return "ellipse2d";
        case Traffic::KvPair: return "kv_pair";
        case Traffic::DepthId: return "depth_id";
        case Traffic::ImageRw: return "image_rw";
    }
    assert(false && "unknown traffic category");
    return "unknown";
}

std::uint64_t LedgerSnapshot::bytes_total() const {
    std::uint64_t total = 0;
    for (auto b : bytes) total += b;
    return total;
}

std::uint64_t LedgerSnapshot::ops_total() const {
    return projections + sh_evals + alpha_evals + boundary_probes + blend_steps;
}

TrafficLedger::TrafficLedger(std::size_t gaussian_count) : load_counts_(gaussian_count) {}

void TrafficLedger::record(Traffic cat, std::uint64_t scalars, int src) {
    bytes_[static_cast<size_t>(cat)] += scalars * kScalarBytes;
    if (src >= 0 && static_cast<size_t>(src) < load_counts_.size()) {
        load_counts_[static_cast<size_t>(src)] += 1;
    }
}

std::uint64_t TrafficLedger::bytes(Traffic cat) const {
    return bytes_[static_cast<size_t>(cat)].load();
}

LedgerSnapshot TrafficLedger::snapshot() const {
    LedgerSnapshot s;
    for (int i = 0; i < kTrafficCategories; ++i) s.bytes[static_cast<size_t>(i)] = bytes_[static_cast<size_t>(i)].load();
    s.projections = projections_.load();
    s.sh_evals = sh_evals_.load();
    s.alpha_evals = alpha_evals_.load();
    s.boundary_probes = boundary_probes_.load();
    s.blend_steps = blend_steps_.load();

    LoadStats& st = s.load_stats;
    std::uint64_t sum = 0;
    for (const auto& c : load_counts_) {
        const std::uint32_t n = c.load();
        if (n == 0) continue;
        ++st.loaded_gaussians;
        sum += n;
        st.max = std::max(st.max, n);
        ++st.histogram[n];
    }
    st.mean = st.loaded_gaussians ? static_cast<double>(sum) / static_cast<double>(st.loaded_gaussians)
                                  : 0.0;
    return s;
}

LoadStats per_gaussian_load_stats(const LedgerSnapshot& ledger) { return ledger.load_stats; }

}  // namespace splat
