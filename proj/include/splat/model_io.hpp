// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "splat/gaussian.hpp"

namespace splat {

/// Loads a binary little-endian point-cloud model (the de-facto trained-splat
/// layout: x y z, f_dc_0..2, f_rest_0..44, opacity logit, log scales, raw
/// quaternion). Activations are applied at load time: sigmoid on opacity,
/// exp on scales, quaternion normalization; log_opacity is precomputed and the
/// SH coefficients are reordered to 16 per channel.
///
/// Throws io_error for format problems (naming the missing property) and
/// validation_error for bad data (naming the vertex index).
GaussianModel load_model(const std::string& path);

/// Inverse of load_model: writes the same binary layout with de-activated
/// values so a load round-trips within float precision.
void save_model(const GaussianModel& model, const std::string& path);

}  // namespace splat
