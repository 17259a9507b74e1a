// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "splat/geometry.hpp"

namespace splat {

/// Pinhole camera with a rigid world-to-camera transform.
struct Camera {
    int width = 0;
    int height = 0;
    float fx = 0.0f;
    float fy = 0.0f;
    float cx = 0.0f;
    float cy = 0.0f;
    float znear = 0.01f;
    Mat3f rot = Mat3f::identity();  // rotation block of the view transform
    Vec3f trans{};                  // translation block of the view transform

    /// World-space position of the optical center, -R^T t.
    Vec3f center() const;
};

/// Throws validation_error if any Camera invariant is broken (dimensions,
/// focal lengths, orthonormality of the rotation block within 1e-5, znear).
void validate_camera(const Camera& cam);

Camera make_camera(int width, int height, float fx, float fy, float cx, float cy,
                   float znear = 0.01f);

/// Parses the JSON camera file documented in the README. Cameras are returned
/// in file order and each one is validated.
std::vector<Camera> load_cameras(const std::string& path);

void save_cameras(const std::vector<Camera>& cams, const std::string& path);

}  // namespace splat
