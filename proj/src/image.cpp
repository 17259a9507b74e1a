// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#include "splat/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <png.h>

#include "splat/error.hpp"

namespace splat {

OutputImage make_image(int width, int height, const Vec3f& fill) {
    OutputImage img;
    img.width = width;
    img.height = height;
    img.rgb.assign(static_cast<size_t>(width) * height, fill);
    return img;
}

unsigned char quantize_channel(float v) {
    const float c = std::clamp(v, 0.0f, 1.0f);
    return static_cast<unsigned char>(std::lround(c * 255.0f));
}

namespace {

std::vector<unsigned char> quantized_rows(const OutputImage& img) {
    std::vector<unsigned char> bytes(static_cast<size_t>(img.width) * img.height * 3);
    for (size_t i = 0; i < img.rgb.size(); ++i) {
        bytes[i * 3 + 0] = quantize_channel(img.rgb[i].x);
        bytes[i * 3 + 1] = quantize_channel(img.rgb[i].y);
        bytes[i * 3 + 2] = quantize_channel(img.rgb[i].z);
    }
    return bytes;
}

void write_ppm(const OutputImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for write: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    const auto bytes = quantized_rows(img);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("write failed: " + path);
}

void write_png(const OutputImage& img, const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw io_error("cannot open for write: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        std::fclose(fp);
        throw io_error("png encoding failed: " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const auto bytes = quantized_rows(img);
    for (int y = 0; y < img.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(bytes.data() +
                                                 static_cast<size_t>(y) * img.width * 3));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace

void write_image(const OutputImage& img, const std::string& path) {
    const bool png = path.size() >= 4 && path.compare(path.size() - 4, 4, ".png") == 0;
    if (png) {
        write_png(img, path);
    } else {
        write_ppm(img, path);
    }
}

}  // namespace splat
