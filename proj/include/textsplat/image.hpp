#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace textsplat {

// Row-major H x W x 3 grid of doubles in [0,1].
struct Image3 {
    int height = 0;
    int width = 0;
    std::vector<double> data;  // size height*width*3

    Image3() = default;
    Image3(int h, int w, double fill = 0.0) : height(h), width(w), data(size_t(h) * w * 3, fill) {}

    double* px(int y, int x) { return data.data() + (size_t(y) * width + x) * 3; }
    const double* px(int y, int x) const { return data.data() + (size_t(y) * width + x) * 3; }
    bool same_shape(const Image3& o) const { return height == o.height && width == o.width; }
    size_t pixel_count() const { return size_t(height) * width; }
};

// Row-major H x W binary grid (values 0/1).
struct MaskGrid {
    int height = 0;
    int width = 0;
    std::vector<uint8_t> data;

    MaskGrid() = default;
    MaskGrid(int h, int w, uint8_t fill = 0) : height(h), width(w), data(size_t(h) * w, fill) {}

    uint8_t& at(int y, int x) { return data[size_t(y) * width + x]; }
    uint8_t at(int y, int x) const { return data[size_t(y) * width + x]; }
    bool any() const {
        for (uint8_t v : data)
            if (v) return true;
        return false;
    }
    size_t popcount() const {
        size_t n = 0;
        for (uint8_t v : data) n += v != 0;
        return n;
    }
};

Image3 read_png_rgb(const std::string& path);
// Any single-channel (or color, reduced by max) PNG, binarized at > 0.
MaskGrid read_png_mask(const std::string& path);
void write_png_rgb(const std::string& path, const Image3& img);
void write_png_gray(const std::string& path, const MaskGrid& mask, uint8_t on_value = 255);

inline double luma(const double* rgb) {
    return 0.2126 * rgb[0] + 0.7152 * rgb[1] + 0.0722 * rgb[2];
}

}  // namespace textsplat
