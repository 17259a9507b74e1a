// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "splat/config.hpp"
#include "splat/ledger.hpp"
#include "splat/metrics.hpp"

namespace splat {

inline constexpr int kReportSchemaVersion = 1;

/// FNV-1a 64-bit digest of a file's bytes, as a hex string.
std::string file_digest(const std::string& path);

nlohmann::json render_config_json(const RenderConfig& cfg);
nlohmann::json gaussian_wise_config_json(const GaussianWiseConfig& cfg);
nlohmann::json ledger_json(const LedgerSnapshot& ledger);
nlohmann::json quality_json(const QualityReport& q);

/// Writes pretty-printed JSON; key order is deterministic.
void write_json(const nlohmann::json& doc, const std::string& path);

}  // namespace splat
