// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>

namespace splat {

struct Vec2f {
    float x = 0.0f;
    float y = 0.0f;
};

struct Vec3f {
    float x = 0.0f;
    float y = 0.0f;
    float z = 0.0f;
};

struct Vec4f {
    float w = 0.0f;
    float x = 0.0f;
    float y = 0.0f;
    float z = 0.0f;
};

inline Vec2f operator-(const Vec2f& a, const Vec2f& b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2f operator+(const Vec2f& a, const Vec2f& b) { return {a.x + b.x, a.y + b.y}; }

inline Vec3f operator+(const Vec3f& a, const Vec3f& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3f operator-(const Vec3f& a, const Vec3f& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3f operator*(float s, const Vec3f& v) { return {s * v.x, s * v.y, s * v.z}; }

inline float dot(const Vec2f& a, const Vec2f& b) { return a.x * b.x + a.y * b.y; }
inline float dot(const Vec3f& a, const Vec3f& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline float norm(const Vec3f& v) { return std::sqrt(dot(v, v)); }

inline Vec3f normalized(const Vec3f& v) {
    const float n = norm(v);
    return n > 0.0f ? Vec3f{v.x / n, v.y / n, v.z / n} : Vec3f{0.0f, 0.0f, 0.0f};
}

/// Row-major 3x3 matrix.
struct Mat3f {
    std::array<float, 9> m{};

    static Mat3f identity() {
        Mat3f r;
        r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return r;
    }
    float at(int r, int c) const { return m[static_cast<size_t>(r) * 3 + static_cast<size_t>(c)]; }
    float& at(int r, int c) { return m[static_cast<size_t>(r) * 3 + static_cast<size_t>(c)]; }
};

inline Vec3f operator*(const Mat3f& a, const Vec3f& v) {
    return {a.m[0] * v.x + a.m[1] * v.y + a.m[2] * v.z,
            a.m[3] * v.x + a.m[4] * v.y + a.m[5] * v.z,
            a.m[6] * v.x + a.m[7] * v.y + a.m[8] * v.z};
}

inline Mat3f operator*(const Mat3f& a, const Mat3f& b) {
    Mat3f r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            float s = 0.0f;
            for (int k = 0; k < 3; ++k) s += a.at(i, k) * b.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

inline Mat3f transposed(const Mat3f& a) {
    Mat3f r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.at(i, j) = a.at(j, i);
    return r;
}

/// Row-major 2x3 matrix (the projection Jacobian shape).
struct Mat23f {
    std::array<float, 6> m{};
    float at(int r, int c) const { return m[static_cast<size_t>(r) * 3 + static_cast<size_t>(c)]; }
    float& at(int r, int c) { return m[static_cast<size_t>(r) * 3 + static_cast<size_t>(c)]; }
};

/// Symmetric 2x2 matrix [[a, b], [b, c]].
struct SymMat2 {
    float a = 0.0f;
    float b = 0.0f;
    float c = 0.0f;

    float det() const { return a * c - b * b; }
    /// Quadratic form d^T M d.
    float quad(const Vec2f& d) const { return a * d.x * d.x + 2.0f * b * d.x * d.y + c * d.y * d.y; }
};

/// Inclusive integer pixel box [x0, x1] x [y0, y1]; empty when x0 > x1 or y0 > y1.
struct PixelBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = -1;
    int y1 = -1;

    bool empty() const { return x0 > x1 || y0 > y1; }
    long long pixel_count() const {
        if (empty()) return 0;
        return static_cast<long long>(x1 - x0 + 1) * static_cast<long long>(y1 - y0 + 1);
    }
    bool contains(int px, int py) const { return px >= x0 && px <= x1 && py >= y0 && py <= y1; }
};

inline PixelBox intersect(const PixelBox& a, const PixelBox& b) {
    return {std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1), std::min(a.y1, b.y1)};
}

}  // namespace splat
