#pragma once

#include <array>
#include <optional>
#include <vector>

#include "textsplat/image.hpp"
#include "textsplat/splats.hpp"

namespace textsplat {

struct Splat2D {
    Eigen::Vector2d mean2d;
    Eigen::Matrix2d cov2d;
    double depth = 0;
};

// EWA screen-space footprint: mean2d is the pinhole projection of the
// center (not bounds-checked — a splat can straddle the image edge), and
// cov2d = J W Sigma W^T J^T + 0.3 I with J the projection Jacobian at the
// center and W the world-to-camera rotation. Absent behind the camera.
std::optional<Splat2D> project_gaussian(const Gaussian& g, const CameraIntrinsics& intr,
                                        const CameraPose& pose);

struct RenderOptions {
    Vec3 background{0, 0, 0};
    int sh_degree = 3;  // highest active SH band
};

// Per-Gaussian gradients plus the screen-space statistics density control
// consumes. Vectors are indexed like the scene.
struct ParamGrads {
    std::vector<Vec3> d_position;
    std::vector<Vec3> d_log_scale;
    std::vector<Vec4> d_rotation;
    std::vector<double> d_opacity_logit;
    std::vector<std::array<double, kShValues>> d_sh;
    std::vector<double> grad2d_norm;  // ||NDC-scaled d(loss)/d(mean2d)||
    std::vector<uint8_t> visible;     // splat touched >= 1 pixel this pass

    void resize(size_t n);
};

namespace detail {

// One depth-sorted on-screen splat with everything backward reuses.
struct VisSplat {
    uint32_t index = 0;  // scene index
    double depth = 0;
    double mean_u = 0, mean_v = 0;
    double conic_a = 0, conic_b = 0, conic_c = 0;  // inverse 2D covariance
    double q_max = 0;                              // alpha cutoff iso-contour
    double opacity = 0;
    double color[3] = {0, 0, 0};
    uint8_t color_clamped[3] = {0, 0, 0};
    double cov2d[3] = {0, 0, 0};  // (xx, xy, yy)
    double t_cam[3] = {0, 0, 0};  // camera-frame center
    double dir[3] = {0, 0, 0};    // unit view direction, world frame
    double dir_len = 0;           // ||mu - camera center||
    int x0 = 0, x1 = -1, y0 = 0, y1 = -1;  // inclusive pixel bounds
};

struct PixelEntry {
    uint32_t vi = 0;        // index into RenderContext::splats
    uint8_t alpha_capped = 0;
    double alpha = 0;
    double T = 0;  // transmittance in front of this entry
};

}  // namespace detail

// Forward products kept so the backward pass never re-evaluates a Gaussian.
struct RenderContext {
    int height = 0, width = 0;
    int sh_degree = 0;
    std::vector<detail::VisSplat> splats;      // depth order (ties by id)
    std::vector<detail::PixelEntry> entries;   // grouped per pixel, front to back
    std::vector<uint32_t> entry_offset;        // per-pixel slot start (capacity)
    std::vector<uint32_t> entry_count;         // per-pixel live entries
    std::vector<double> final_T;               // per-pixel end transmittance
};

Image3 render_forward(const SplatScene& scene, const CameraIntrinsics& intr,
                      const CameraPose& pose, const RenderOptions& opts, RenderContext& ctx);

Image3 render(const SplatScene& scene, const CameraIntrinsics& intr, const CameraPose& pose,
              const RenderOptions& opts = {});

// Gradients of sum(grad_image . rendered) with respect to every Gaussian
// parameter, using the forward products in ctx.
ParamGrads render_backward_ctx(const SplatScene& scene, const CameraIntrinsics& intr,
                               const CameraPose& pose, const RenderOptions& opts,
                               const Image3& grad_image, const RenderContext& ctx);

// Convenience wrapper that runs its own forward pass.
ParamGrads render_backward(const SplatScene& scene, const CameraIntrinsics& intr,
                           const CameraPose& pose, const RenderOptions& opts,
                           const Image3& grad_image);

// SH radiance toward dir (unit), bands 0..degree; per channel
// max(0, 0.5 + basis . coeffs). clamped reports zeroed channels.
Vec3 eval_sh(const std::array<double, kShValues>& sh, const Vec3& dir, int degree,
             uint8_t clamped[3]);

}  // namespace textsplat
