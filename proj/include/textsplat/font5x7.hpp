#pragma once

#include <array>
#include <string>
#include <vector>

#include "textsplat/image.hpp"

namespace textsplat {

// 5x7 dot-matrix font covering A-Z and 0-9. Glyphs are drawn from the
// classic HD44780-style patterns, adjusted so every glyph is a single
// 8-connected component and no two glyphs share a pattern.
inline constexpr int kGlyphCols = 5;
inline constexpr int kGlyphRows = 7;

bool glyph_supported(char c);

// Rows top to bottom; bit 4 is the leftmost column.
const std::array<uint8_t, kGlyphRows>& glyph_rows(char c);

// Where one character landed in a rasterized line.
struct GlyphPlacement {
    char ch = 0;
    int x = 0, y = 0;  // top-left of the 5x7 cell, pixels
    int w = 0, h = 0;  // cell size (5*s by 7*s)
};

struct GlyphRaster {
    MaskGrid ink;  // 1 = ink
    std::vector<GlyphPlacement> placements;
};

// Single text line. glyph_px is the glyph height in pixels; dots render at
// integer scale s = max(1, glyph_px / 7), with a one-dot gap between
// glyphs, so "AB" is 11*s wide. Unsupported characters are an error.
GlyphRaster rasterize_glyphs(const std::string& text, int glyph_px);

}  // namespace textsplat
