// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include "splat/model_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "splat/error.hpp"

namespace splat {

namespace {

constexpr int kRestPerChannel = 15;

std::vector<std::string> required_properties() {
    std::vector<std::string> props = {"x", "y", "z"};
    for (int i = 0; i < 3; ++i) props.push_back("f_dc_" + std::to_string(i));
    for (int i = 0; i < 45; ++i) props.push_back("f_rest_" + std::to_string(i));
    props.push_back("opacity");
    for (int i = 0; i < 3; ++i) props.push_back("scale_" + std::to_string(i));
    for (int i = 0; i < 4; ++i) props.push_back("rot_" + std::to_string(i));
    return props;
}

float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }
float logit(float p) { return std::log(p / (1.0f - p)); }

void check_finite(float v, size_t vertex, const char* what) {
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "non-finite " << what << " at vertex " << vertex;
        throw validation_error(msg.str());
    }
}

}  // namespace

GaussianModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open model file: " + path);

    std::string line;
    if (!std::getline(in, line) || line != "ply") throw io_error(path + ": not a point-cloud file");
    size_t vertex_count = 0;
    bool little_endian = false;
    std::map<std::string, int> prop_index;
    int prop_count = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "end_header") break;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            little_endian = (fmt == "binary_little_endian");
        } else if (tok == "element") {
            std::string name;
            ls >> name >> vertex_count;
            if (name != "vertex") throw io_error(path + ": unsupported element '" + name + "'");
        } else if (tok == "property") {
            std::string type, name;
            ls >> type >> name;
            if (type != "float")
                throw io_error(path + ": unsupported property type '" + type + "'");
            prop_index[name] = prop_count++;
        } else if (tok == "comment" || tok == "obj_info" || tok.empty()) {
            continue;
        } else {
            throw io_error(path + ": unrecognized header line '" + line + "'");
        }
    }
    if (!little_endian) throw io_error(path + ": expected binary_little_endian format");

    const auto required = required_properties();
    std::vector<int> offsets;
    offsets.reserve(required.size());
    for (const auto& name : required) {
        auto it = prop_index.find(name);
        if (it == prop_index.end()) throw io_error(path + ": missing property: " + name);
        offsets.push_back(it->second);
    }

    const size_t stride = static_cast<size_t>(prop_count) * sizeof(float);
    std::vector<char> raw(stride * vertex_count);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size())
        throw io_error(path + ": truncated vertex data");

    GaussianModel model;
    model.source_path = path;
    model.gaussians.resize(vertex_count);
    for (size_t v = 0; v < vertex_count; ++v) {
        const char* rec = raw.data() + v * stride;
        float f[kGaussianScalars];
        for (size_t i = 0; i < required.size(); ++i) {
            std::memcpy(&f[i], rec + static_cast<size_t>(offsets[i]) * sizeof(float),
                        sizeof(float));
            check_finite(f[i], v, required[i].c_str());
        }
        Gaussian3D& g = model.gaussians[v];
        g.position = {f[0], f[1], f[2]};
        // File layout: f_dc per channel, then f_rest planar by channel.
        for (int ch = 0; ch < 3; ++ch) {
            g.sh[static_cast<size_t>(ch) * kShCoeffsPerChannel] = f[3 + ch];
            for (int j = 0; j < kRestPerChannel; ++j)
                g.sh[static_cast<size_t>(ch) * kShCoeffsPerChannel + 1 + j] =
                    f[6 + ch * kRestPerChannel + j];
        }
        const float raw_opacity = f[51];
        g.opacity = std::clamp(sigmoid(raw_opacity), 1e-30f, 1.0f - 1e-7f);
        g.log_opacity = std::log(g.opacity);
        g.scale = {std::exp(f[52]), std::exp(f[53]), std::exp(f[54])};
        check_finite(g.scale.x, v, "activated scale");
        check_finite(g.scale.y, v, "activated scale");
        check_finite(g.scale.z, v, "activated scale");
        Vec4f q{f[55], f[56], f[57], f[58]};
        const float qn = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
        if (qn < 1e-12f) {
            std::ostringstream msg;
            msg << "zero-norm rotation at vertex " << v;
            throw validation_error(msg.str());
        }
        g.rotation = {q.w / qn, q.x / qn, q.y / qn, q.z / qn};
    }
    return model;
}

void save_model(const GaussianModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write model file: " + path);

    const auto props = required_properties();
    out << "ply\nformat binary_little_endian 1.0\nelement vertex " << model.gaussians.size()
        << "\n";
    for (const auto& p : props) out << "property float " << p << "\n";
    out << "end_header\n";

    std::vector<float> rec(props.size());
    for (const Gaussian3D& g : model.gaussians) {
        rec[0] = g.position.x;
        rec[1] = g.position.y;
        rec[2] = g.position.z;
        for (int ch = 0; ch < 3; ++ch) {
            rec[3 + static_cast<size_t>(ch)] = g.sh[static_cast<size_t>(ch) * kShCoeffsPerChannel];
            for (int j = 0; j < kRestPerChannel; ++j)
                rec[6 + static_cast<size_t>(ch) * kRestPerChannel + static_cast<size_t>(j)] =
                    g.sh[static_cast<size_t>(ch) * kShCoeffsPerChannel + 1 + static_cast<size_t>(j)];
        }
        rec[51] = logit(g.opacity);
        rec[52] = std::log(g.scale.x);
        rec[53] = std::log(g.scale.y);
        rec[54] = std::log(g.scale.z);
        rec[55] = g.rotation.w;
        rec[56] = g.rotation.x;
        rec[57] = g.rotation.y;
        rec[58] = g.rotation.z;
        out.write(reinterpret_cast<const char*>(rec.data()),
                  static_cast<std::streamsize>(rec.size() * sizeof(float)));
    }
    if (!out) throw io_error("write failed: " + path);
}

}  // namespace splat
