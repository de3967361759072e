#include "textsplat/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "textsplat/common.hpp"

namespace textsplat {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

// Decodes to 8-bit RGB rows regardless of source format.
std::vector<std::vector<uint8_t>> decode_rgb8(const std::string& path, int& h, int& w) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError(cat(path, ": cannot open for reading"));

    uint8_t sig[8];
    if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8))
        throw ParseError(cat(path, ":0: not a PNG file"));

    PngReader r;
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) throw IoError("libpng: read struct allocation failed");
    r.info = png_create_info_struct(r.png);
    if (!r.info) throw IoError("libpng: info struct allocation failed");
    if (setjmp(png_jmpbuf(r.png))) throw ParseError(cat(path, ": PNG decode failed"));

    png_init_io(r.png, f.get());
    png_set_sig_bytes(r.png, 8);
    png_read_info(r.png, r.info);

    png_set_strip_16(r.png);
    png_set_packing(r.png);
    png_set_palette_to_rgb(r.png);
    if (png_get_color_type(r.png, r.info) == PNG_COLOR_TYPE_GRAY &&
        png_get_bit_depth(r.png, r.info) < 8)
        png_set_expand_gray_1_2_4_to_8(r.png);
    png_set_strip_alpha(r.png);
    png_set_gray_to_rgb(r.png);
    png_read_update_info(r.png, r.info);

    h = int(png_get_image_height(r.png, r.info));
    w = int(png_get_image_width(r.png, r.info));
    std::vector<std::vector<uint8_t>> rows(size_t(h), std::vector<uint8_t>(size_t(w) * 3));
    std::vector<png_bytep> row_ptrs(static_cast<size_t>(h));
    for (int y = 0; y < h; ++y) row_ptrs[size_t(y)] = rows[size_t(y)].data();
    png_read_image(r.png, row_ptrs.data());
    png_read_end(r.png, nullptr);
    return rows;
}

}  // namespace

Image3 read_png_rgb(const std::string& path) {
    int h = 0, w = 0;
    auto rows = decode_rgb8(path, h, w);
    Image3 img(h, w);
    for (int y = 0; y < h; ++y) {
        const uint8_t* src = rows[size_t(y)].data();
        double* dst = img.px(y, 0);
        for (int i = 0; i < w * 3; ++i) dst[i] = double(src[i]) / 255.0;
    }
    return img;
}

MaskGrid read_png_mask(const std::string& path) {
    int h = 0, w = 0;
    auto rows = decode_rgb8(path, h, w);
    MaskGrid m(h, w);
    for (int y = 0; y < h; ++y) {
        const uint8_t* src = rows[size_t(y)].data();
        for (int x = 0; x < w; ++x) {
            uint8_t v = std::max({src[x * 3], src[x * 3 + 1], src[x * 3 + 2]});
            m.at(y, x) = v > 0 ? 1 : 0;
        }
    }
    return m;
}

void write_png_rgb(const std::string& path, const Image3& img) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError(cat(path, ": cannot open for writing"));

    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) throw IoError("libpng: write struct allocation failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) throw IoError("libpng: info struct allocation failed");
    if (setjmp(png_jmpbuf(w.png))) throw IoError(cat(path, ": PNG encode failed"));

    png_init_io(w.png, f.get());
    png_set_IHDR(w.png, w.info, png_uint_32(img.width), png_uint_32(img.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);

    std::vector<uint8_t> row(size_t(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        const double* src = img.px(y, 0);
        for (int i = 0; i < img.width * 3; ++i) {
            double v = std::lround(std::clamp(src[i], 0.0, 1.0) * 255.0);
            row[size_t(i)] = uint8_t(v);
        }
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, nullptr);
}

void write_png_gray(const std::string& path, const MaskGrid& mask, uint8_t on_value) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError(cat(path, ": cannot open for writing"));

    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) throw IoError("libpng: write struct allocation failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) throw IoError("libpng: info struct allocation failed");
    if (setjmp(png_jmpbuf(w.png))) throw IoError(cat(path, ": PNG encode failed"));

    png_init_io(w.png, f.get());
    png_set_IHDR(w.png, w.info, png_uint_32(mask.width), png_uint_32(mask.height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);

    std::vector<uint8_t> row(size_t(mask.width));
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) row[size_t(x)] = mask.at(y, x) ? on_value : 0;
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, nullptr);
}

}  // namespace textsplat
