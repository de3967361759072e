#include "textsplat/synthbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "textsplat/common.hpp"
#include "textsplat/font5x7.hpp"
#include "textsplat/rng.hpp"
#include "textsplat/threading.hpp"

namespace textsplat {

namespace {

namespace fs = std::filesystem;

constexpr double kPlateWidth = 1.6;
constexpr double kCylinderArc = 2.0 * std::numbers::pi / 3.0;
constexpr double kFocalFactor = 1.2;
const Vec3 kPlateColor(0.12, 0.12, 0.14);
const Vec3 kInkColor(0.95, 0.95, 0.95);
// Empty texel ring (Chebyshev) required around off-ink samples so pixel
// quantization in any view cannot land them on an ink mask pixel.
constexpr int kInkGuardTexels = 3;

double deg(double d) { return d * std::numbers::pi / 180.0; }

struct Texture {
    int w = 0, h = 0;
    MaskGrid ink;
    std::vector<int16_t> word;  // word index per texel, -1 elsewhere
};

Texture build_texture(const std::vector<std::string>& words, int glyph_px) {
    int s = std::max(1, glyph_px / kGlyphRows);
    std::vector<GlyphRaster> rasters;
    int max_w = 0;
    for (const auto& w : words) {
        rasters.push_back(rasterize_glyphs(w, glyph_px));
        max_w = std::max(max_w, rasters.back().ink.width);
    }
    int margin = 3 * s;
    Texture tex;
    tex.w = max_w + 2 * margin;
    tex.h = int(words.size()) * kGlyphRows * s + (int(words.size()) + 1) * margin;
    tex.ink = MaskGrid(tex.h, tex.w);
    tex.word.assign(size_t(tex.h) * tex.w, -1);
    for (size_t i = 0; i < rasters.size(); ++i) {
        const MaskGrid& g = rasters[i].ink;
        int oy = margin + int(i) * (kGlyphRows * s + margin);
        int ox = margin + (max_w - g.width) / 2;
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x)
                if (g.at(y, x)) {
                    tex.ink.at(oy + y, ox + x) = 1;
                    tex.word[size_t(oy + y) * tex.w + ox + x] = int16_t(i);
                }
    }
    return tex;
}

// Maps texture texels onto the plate surface and intersects camera rays.
struct Surface {
    SynthSpec::Layout layout;
    int tw = 0, th = 0;
    double pw = 0, ph = 0;  // world extent
    double radius = 0;      // cylinder radius

    Vec3 texel_to_world(double u, double v) const {
        double y = (0.5 - v / th) * ph;
        if (layout == SynthSpec::Layout::FlatPlane) {
            double x = (u / tw - 0.5) * pw;
            return {x, y, 0.0};
        }
        double psi = (u / tw - 0.5) * kCylinderArc;
        return {radius * std::sin(psi), y, radius * (std::cos(psi) - 1.0)};
    }

    // d is the unnormalized world ray with camera-frame z component 1, so
    // the parameter t equals the camera depth of the hit.
    bool hit(const Vec3& o, const Vec3& d, double& t_out, double& u_out, double& v_out) const {
        if (layout == SynthSpec::Layout::FlatPlane) {
            if (std::abs(d.z()) < 1e-14) return false;
            double t = -o.z() / d.z();
            if (t <= 1e-9) return false;
            double hx = o.x() + t * d.x(), hy = o.y() + t * d.y();
            double u = (hx / pw + 0.5) * tw;
            double v = (0.5 - hy / ph) * th;
            if (u < 0 || u >= tw || v < 0 || v >= th) return false;
            t_out = t;
            u_out = u;
            v_out = v;
            return true;
        }
        double a = d.x() * d.x() + d.z() * d.z();
        if (a < 1e-16) return false;
        double zc = o.z() + radius;
        double b = 2.0 * (o.x() * d.x() + zc * d.z());
        double c = o.x() * o.x() + zc * zc - radius * radius;
        double disc = b * b - 4 * a * c;
        if (disc < 0) return false;
        double sq = std::sqrt(disc);
        for (double t : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)}) {
            if (t <= 1e-9) continue;
            Vec3 h = o + t * d;
            double psi = std::atan2(h.x(), h.z() + radius);
            if (std::abs(psi) > kCylinderArc / 2) continue;
            double u = (psi / kCylinderArc + 0.5) * tw;
            double v = (0.5 - h.y() / ph) * th;
            if (u < 0 || u >= tw || v < 0 || v >= th) continue;
            t_out = t;
            u_out = u;
            v_out = v;
            return true;
        }
        return false;
    }
};

CameraPose look_at_pose(int32_t image_id, const std::string& name, const Vec3& position,
                        const Vec3& target) {
    Vec3 f = (target - position).normalized();
    Vec3 up(0, 1, 0);
    Vec3 xc = f.cross(up).normalized();
    Vec3 yc = f.cross(xc);  // z cross x for the right-handed (x, y, z) triad
    Mat3 r;
    r.row(0) = xc;
    r.row(1) = yc;
    r.row(2) = f;
    CameraPose pose;
    pose.image_id = image_id;
    pose.camera_id = 1;
    pose.name = name;
    pose.rotation = matrix_to_quat(r);
    pose.translation = -(r * position);
    return pose;
}

}  // namespace

void SynthSpec::validate() const {
    if (words.empty()) throw InvalidArgument("synth: need at least one word");
    for (const auto& w : words) {
        if (w.empty()) throw InvalidArgument("synth: empty word");
        for (char c : w)
            if (!glyph_supported(c))
                throw InvalidArgument(cat("synth: unsupported character '", c, "' in word \"", w,
                                          "\" (atlas covers A-Z and 0-9)"));
    }
    if (n_cameras <= 0 || image_size <= 0 || glyph_px <= 0 || n_points <= 0)
        throw InvalidArgument("synth: counts must be positive");
    if (!(ink_fraction > 0.0 && ink_fraction <= 1.0))
        throw InvalidArgument(cat("synth: ink_fraction must lie in (0, 1], got ", ink_fraction));
    if (noise < 0) throw InvalidArgument(cat("synth: noise must be non-negative, got ", noise));
}

bool point_visible(const Vec3& p, const CameraIntrinsics& intr, const CameraPose& pose,
                   const std::vector<double>& depth) {
    auto pc = project(intr, pose, p);
    if (!pc) return false;
    double ref = depth[size_t(std::floor(pc->v)) * intr.width + size_t(std::floor(pc->u))];
    return pc->depth <= ref * (1.0 + kDepthVisibilityTolerance);
}

SynthResult generate_scene(const SynthSpec& spec, const std::string& out_dir) {
    spec.validate();
    Texture tex = build_texture(spec.words, spec.glyph_px);

    SynthResult result;
    result.texture_ink = tex.ink;
    result.texel_word = tex.word;
    result.plate_width = kPlateWidth;
    result.plate_height = kPlateWidth * tex.h / tex.w;

    Surface surf;
    surf.layout = spec.layout;
    surf.tw = tex.w;
    surf.th = tex.h;
    surf.pw = result.plate_width;
    surf.ph = result.plate_height;
    surf.radius = kPlateWidth / kCylinderArc;

    CameraIntrinsics intr;
    intr.camera_id = 1;
    intr.model = CameraModel::Pinhole;
    intr.width = intr.height = spec.image_size;
    intr.fx = intr.fy = kFocalFactor * spec.image_size;
    intr.cx = intr.cy = spec.image_size / 2.0;
    result.intrinsics = intr;
    result.model.intrinsics[1] = intr;

    // Camera orbit. Held-out views (every 8th by name) stay distant and
    // near-frontal so printed text is legible in them; training views sweep
    // wide angles with a few close-ups and mid-range shots, which is what
    // spreads the per-point visibility counts.
    int n = spec.n_cameras;
    for (int i = 0; i < n; ++i) {
        double theta, phi, r;
        if (i % 8 == 0) {
            int k = i / 8;
            theta = deg(-6.0 + 4.0 * k);
            phi = deg((k % 2 == 0 ? 2.5 : -2.5) + 0.5 * k);
            r = 2.7 + 0.02 * k;
        } else {
            theta = deg(n > 1 ? -40.0 + 80.0 * i / (n - 1) : 0.0);
            phi = deg(12.0 * std::sin(2.0 * std::numbers::pi * i / 9.0));
            if (i % 9 == 5)
                r = 1.15;
            else if (i % 4 == 2)
                r = 1.45;
            else
                r = 2.7 * (1.0 + 0.05 * std::cos(2.0 * std::numbers::pi * i / 13.0));
        }
        Vec3 pos = r * Vec3(std::sin(theta) * std::cos(phi), std::sin(phi),
                            std::cos(theta) * std::cos(phi));
        char name[32];
        std::snprintf(name, sizeof name, "cam_%03d.png", i);
        result.model.poses.push_back(look_at_pose(i + 1, name, pos, Vec3::Zero()));
    }

    // Ray-traced reference views with exact ink masks and depth maps.
    int H = intr.height, W = intr.width;
    result.views.resize(size_t(n));
    parallel_chunks(n, [&](int vi) {
        const CameraPose& pose = result.model.poses[size_t(vi)];
        Mat3 rt = pose.rotation_matrix().transpose();
        Vec3 center = pose.camera_center();
        SynthView view;
        view.name = pose.name;
        view.pose = pose;
        view.is_eval = vi % 8 == 0;
        view.image = Image3(H, W);
        view.mask = MaskGrid(H, W);
        view.depth.assign(size_t(H) * W, std::numeric_limits<double>::infinity());
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                Vec3 dir_cam((x + 0.5 - intr.cx) / intr.fx, (y + 0.5 - intr.cy) / intr.fy, 1.0);
                Vec3 d = rt * dir_cam;
                double t, u, v;
                if (!surf.hit(center, d, t, u, v)) continue;
                bool ink = tex.ink.at(int(v), int(u)) != 0;
                const Vec3& color = ink ? kInkColor : kPlateColor;
                double* px = view.image.px(y, x);
                px[0] = color[0];
                px[1] = color[1];
                px[2] = color[2];
                view.mask.at(y, x) = ink;
                view.depth[size_t(y) * W + x] = t;
            }
        result.views[size_t(vi)] = std::move(view);
    });

    // Per-view word visibility (share of the word's ink texels that pass
    // the depth test).
    std::vector<std::vector<std::pair<int, int>>> word_texels(spec.words.size());
    for (int y = 0; y < tex.h; ++y)
        for (int x = 0; x < tex.w; ++x) {
            int16_t w = tex.word[size_t(y) * tex.w + x];
            if (w >= 0) word_texels[size_t(w)].emplace_back(y, x);
        }
    for (auto& view : result.views) {
        for (size_t wi = 0; wi < spec.words.size(); ++wi) {
            const auto& texels = word_texels[wi];
            if (texels.empty()) continue;
            size_t seen = 0;
            for (auto [ty, tx] : texels)
                if (point_visible(surf.texel_to_world(tx + 0.5, ty + 0.5), intr, view.pose,
                                  view.depth))
                    seen += 1;
            if (double(seen) >= kWordVisibleFraction * double(texels.size()))
                view.visible_words.push_back(spec.words[wi]);
        }
    }

    // Sparse surface samples: ink points on stroke interiors, the rest on
    // texels with an ink-free guard ring, so segmentation ground truth is
    // unambiguous at every view's pixel grid.
    auto ink_at = [&](int y, int x) {
        return y >= 0 && y < tex.h && x >= 0 && x < tex.w && tex.ink.at(y, x) != 0;
    };
    std::vector<std::pair<int, int>> interior_ink;
    for (int y = 0; y < tex.h; ++y)
        for (int x = 0; x < tex.w; ++x) {
            if (!tex.ink.at(y, x)) continue;
            bool interior = true;
            for (int dy = -1; dy <= 1 && interior; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (!ink_at(y + dy, x + dx)) {
                        interior = false;
                        break;
                    }
            if (interior) interior_ink.emplace_back(y, x);
        }
    auto clear_ring = [&](int y, int x, int g) {
        for (int dy = -g; dy <= g; ++dy)
            for (int dx = -g; dx <= g; ++dx)
                if (ink_at(y + dy, x + dx)) return false;
        return true;
    };

    Rng rng(spec.seed);
    size_t want_ink = size_t(std::lround(spec.n_points * spec.ink_fraction));
    want_ink = std::min(want_ink, interior_ink.size());
    rng.shuffle(interior_ink);
    size_t want_plate = size_t(spec.n_points) - want_ink;
    std::vector<std::pair<int, int>> plate_texels;
    for (int g = kInkGuardTexels; g >= 0; --g) {
        plate_texels.clear();
        for (int y = 0; y < tex.h; ++y)
            for (int x = 0; x < tex.w; ++x)
                if (!tex.ink.at(y, x) && clear_ring(y, x, g)) plate_texels.emplace_back(y, x);
        if (plate_texels.size() >= want_plate) break;
    }
    rng.shuffle(plate_texels);
    if (plate_texels.size() < want_plate) {
        std::fprintf(stderr,
                     "synth: warning: only %zu off-ink texels available for %zu samples\n",
                     plate_texels.size(), want_plate);
        want_plate = plate_texels.size();
    }

    std::vector<std::pair<int, int>> chosen(interior_ink.begin(),
                                            interior_ink.begin() + long(want_ink));
    chosen.insert(chosen.end(), plate_texels.begin(), plate_texels.begin() + long(want_plate));
    int64_t next_point_id = 1;
    for (size_t pi = 0; pi < chosen.size(); ++pi) {
        auto [ty, tx] = chosen[pi];
        Vec3 p = surf.texel_to_world(tx + 0.5, ty + 0.5);
        if (spec.noise > 0)
            p += spec.noise * Vec3(rng.normal(), rng.normal(), rng.normal());
        std::vector<int32_t> track;
        for (const auto& view : result.views)
            if (point_visible(p, intr, view.pose, view.depth))
                track.push_back(view.pose.image_id);
        if (track.empty()) continue;  // never triangulated
        bool is_ink = pi < want_ink;
        const Vec3& c = is_ink ? kInkColor : kPlateColor;
        SparsePoint sp;
        sp.point_id = next_point_id++;
        sp.position = p;
        for (int k = 0; k < 3; ++k)
            sp.color[size_t(k)] = uint8_t(std::lround(std::clamp(c[k], 0.0, 1.0) * 255.0));
        sp.error = 0.5;
        sp.track = std::move(track);
        result.model.points.push_back(std::move(sp));
        result.point_is_ink.push_back(is_ink);
    }

    if (!out_dir.empty()) {
        fs::create_directories(fs::path(out_dir) / "sparse" / "0");
        fs::create_directories(fs::path(out_dir) / "images");
        fs::create_directories(fs::path(out_dir) / "masks");
        fs::create_directories(fs::path(out_dir) / "gt_text");
        write_colmap_model_binary(result.model, (fs::path(out_dir) / "sparse" / "0").string());
        for (const auto& view : result.views) {
            write_png_rgb((fs::path(out_dir) / "images" / view.name).string(), view.image);
            write_png_gray((fs::path(out_dir) / "masks" / view.name).string(), view.mask);
            if (!view.is_eval) continue;
            std::string stem = view.name.substr(0, view.name.find_last_of('.'));
            std::ofstream gt((fs::path(out_dir) / "gt_text" / (stem + ".txt")).string());
            if (!gt) throw IoError(cat("synth: cannot write ground-truth sidecar for ", stem));
            gt << "# words readable in this view\n";
            for (const auto& w : view.visible_words) gt << w << "\n";
        }
    }
    return result;
}

}  // namespace textsplat
