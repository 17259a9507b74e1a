// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace splat {

/// File/format level failures (missing properties, malformed headers, OS errors).
class io_error : public std::runtime_error {
  public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Content that parsed but violates a documented invariant (non-finite values,
/// non-orthonormal rotations, out-of-range parameters).
class validation_error : public std::runtime_error {
  public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace splat
