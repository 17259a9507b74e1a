// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include "splat/camera.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "splat/error.hpp"

namespace splat {

Vec3f Camera::center() const {
    const Mat3f rt = transposed(rot);
    const Vec3f c = rt * trans;
    return {-c.x, -c.y, -c.z};
}

void validate_camera(const Camera& cam) {
    if (cam.width < 1 || cam.height < 1)
        throw validation_error("camera: width and height must be at least 1");
    if (!(cam.fx > 0.0f) || !(cam.fy > 0.0f))
        throw validation_error("camera: focal lengths must be positive");
    if (!(cam.znear > 0.0f)) throw validation_error("camera: znear must be positive");

    const Mat3f rrt = cam.rot * transposed(cam.rot);
    const Mat3f id = Mat3f::identity();
    for (int i = 0; i < 9; ++i) {
        if (std::abs(rrt.m[i] - id.m[i]) > 1e-5f)
            throw validation_error("camera: view rotation block is not orthonormal");
    }
}

Camera make_camera(int width, int height, float fx, float fy, float cx, float cy, float znear) {
    Camera cam;
    cam.width = width;
    cam.height = height;
    cam.fx = fx;
    cam.fy = fy;
    cam.cx = cx;
    cam.cy = cy;
    cam.znear = znear;
    return cam;
}

namespace {

Camera camera_from_json(const nlohmann::json& j) {
    Camera cam;
    try {
        cam.width = j.at("width").get<int>();
        cam.height = j.at("height").get<int>();
        cam.fx = j.at("fx").get<float>();
        cam.fy = j.at("fy").get<float>();
        cam.cx = j.at("cx").get<float>();
        cam.cy = j.at("cy").get<float>();
        cam.znear = j.at("znear").get<float>();
        const auto view = j.at("view").get<std::vector<float>>();
        if (view.size() != 16) throw io_error("camera: view must hold 16 numbers (row-major 4x4)");
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) cam.rot.at(r, c) = view[static_cast<size_t>(r) * 4 + c];
        cam.trans = {view[3], view[7], view[11]};
        const float tail[4] = {view[12], view[13], view[14], view[15]};
        if (std::abs(tail[0]) > 1e-6f || std::abs(tail[1]) > 1e-6f || std::abs(tail[2]) > 1e-6f ||
            std::abs(tail[3] - 1.0f) > 1e-6f)
            throw validation_error("camera: last view row must be [0, 0, 0, 1]");
    } catch (const nlohmann::json::exception& e) {
        throw io_error(std::string("camera file: ") + e.what());
    }
    validate_camera(cam);
    return cam;
}

}  // namespace

std::vector<Camera> load_cameras(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open camera file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw io_error("camera file " + path + ": " + e.what());
    }
    if (!doc.contains("cameras") || !doc["cameras"].is_array())
        throw io_error("camera file " + path + ": missing \"cameras\" array");
    std::vector<Camera> cams;
    for (const auto& j : doc["cameras"]) cams.push_back(camera_from_json(j));
    return cams;
}

void save_cameras(const std::vector<Camera>& cams, const std::string& path) {
    nlohmann::json doc;
    auto& arr = doc["cameras"] = nlohmann::json::array();
    for (const Camera& cam : cams) {
        nlohmann::json j;
        j["width"] = cam.width;
        j["height"] = cam.height;
        j["fx"] = cam.fx;
        j["fy"] = cam.fy;
        j["cx"] = cam.cx;
        j["cy"] = cam.cy;
        j["znear"] = cam.znear;
        std::vector<float> view(16, 0.0f);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) view[static_cast<size_t>(r) * 4 + c] = cam.rot.at(r, c);
        view[3] = cam.trans.x;
        view[7] = cam.trans.y;
        view[11] = cam.trans.z;
        view[15] = 1.0f;
        j["view"] = view;
        arr.push_back(std::move(j));
    }
    std::ofstream out(path);
    if (!out) throw io_error("cannot write camera file: " + path);
    out << doc.dump(2) << "\n";
}

}  // namespace splat
