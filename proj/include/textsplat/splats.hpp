#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "textsplat/geometry.hpp"
#include "textsplat/rng.hpp"

namespace textsplat {

// Spherical harmonics: degree 0..3 -> 16 coefficients per color channel.
inline constexpr int kShCoeffsPerChannel = 16;
inline constexpr int kShValues = 3 * kShCoeffsPerChannel;
// Y_0^0; degree-0 color mapping is color = 0.5 + kSh0 * sh[0].
inline constexpr double kSh0 = 0.28209479177387814;

enum class Region : uint8_t { NonText = 0, Text = 1 };

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

// One anisotropic 3D Gaussian. Stored parameters are pre-activation:
// scale = exp(log_scale), opacity = sigmoid(opacity_logit), and the
// quaternion is normalized wherever a rotation matrix is formed.
struct Gaussian {
    Vec3 position{0, 0, 0};
    Vec3 log_scale{0, 0, 0};
    Vec4 rotation{1, 0, 0, 0};  // (w, x, y, z)
    double opacity_logit = 0;
    // Layout: sh[channel * 16 + coeff], channels R,G,B, coeff 0 = DC.
    std::array<double, kShValues> sh{};
    Region region = Region::NonText;
    int64_t id = 0;

    double opacity() const { return sigmoid(opacity_logit); }
    Vec3 scale() const {
        return Vec3(std::exp(log_scale[0]), std::exp(log_scale[1]), std::exp(log_scale[2]));
    }
};

struct SplatScene {
    std::vector<Gaussian> gaussians;
    // Radius of the camera-position bounding sphere; scales position LRs.
    double scene_extent = 1.0;
    // Id allocator keeping ids unique across splits/clones/prunes.
    int64_t next_id = 0;

    size_t size() const { return gaussians.size(); }
    int64_t fresh_id() { return next_id++; }
    size_t count_region(Region r) const;
};

// Normalized copy of the quaternion (safe for near-zero input).
Vec4 normalized_quat(const Vec4& q);

// World-space covariance R * diag(scale^2) * R^T.
Mat3 covariance(const Gaussian& g);

// One draw from N(position, covariance(g)).
Vec3 sample_position(const Gaussian& g, Rng& rng);

}  // namespace textsplat
