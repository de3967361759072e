#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textsplat/colmap_io.hpp"
#include "textsplat/geometry.hpp"
#include "textsplat/image.hpp"

namespace textsplat {

// A self-contained synthetic text scene: words printed on a plate (flat or
// a 120-degree cylindrical arc), viewed by an orbit of cameras. The ground
// truth comes from a tiny ray tracer, never from the splat renderer.
struct SynthSpec {
    std::vector<std::string> words = {"FRESH", "MANGO", "42"};
    enum class Layout { FlatPlane, Cylinder };
    Layout layout = Layout::FlatPlane;
    int n_cameras = 27;
    int image_size = 128;
    int glyph_px = 21;       // glyph height in texture texels
    int n_points = 900;      // sparse surface samples
    double ink_fraction = 0.25;  // share of samples placed on ink
    double noise = 0.003;    // jitter sigma on sample positions, world units
    uint64_t seed = 1;

    void validate() const;
};

struct SynthView {
    std::string name;
    CameraPose pose;
    Image3 image;
    MaskGrid mask;                          // exact ink footprint, undilated
    std::vector<double> depth;              // H*W ray depths, +inf on miss
    std::vector<std::string> visible_words; // nearly fully visible words
    bool is_eval = false;
};

struct SynthResult {
    CameraIntrinsics intrinsics;
    std::vector<SynthView> views;
    ColmapModel model;                 // poses + jittered points with tracks
    std::vector<uint8_t> point_is_ink; // parallel to model.points
    MaskGrid texture_ink;              // plate texture, 1 = ink texel
    std::vector<int16_t> texel_word;   // per texel: word index or -1
    double plate_width = 0, plate_height = 0;
};

// Fraction a point may sit behind the reference depth and still count as
// visible (covers jitter and surface obliquity inside one pixel).
inline constexpr double kDepthVisibilityTolerance = 0.015;

// Share of a word's ink texels that must pass the visibility test for the
// word to be listed in a view's ground-truth sidecar.
inline constexpr double kWordVisibleFraction = 0.98;

// True when p projects into the view and its camera depth is within
// tolerance of the reference depth at the target pixel.
bool point_visible(const Vec3& p, const CameraIntrinsics& intr, const CameraPose& pose,
                   const std::vector<double>& depth);

// Build the scene; when out_dir is non-empty, also write the dataset tree
// (sparse/0 binary model, images/, masks/, gt_text/) there.
SynthResult generate_scene(const SynthSpec& spec, const std::string& out_dir = {});

}  // namespace textsplat
