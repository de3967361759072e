#include "textsplat/render.hpp"

#include <algorithm>
#include <cmath>

#include "textsplat/common.hpp"
#include "textsplat/threading.hpp"

namespace textsplat {

namespace {

constexpr double kAlphaCap = 0.99;
constexpr double kAlphaMin = 1.0 / 255.0;
// Gradient reduction is chunked by pixel rows with a fixed chunk count and
// reduced in chunk order, so sums do not depend on the worker count.
constexpr int kRowChunks = 16;

// Real spherical-harmonics basis constants, bands 0..3.
constexpr double kC0 = 0.28209479177387814;
constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                           -1.0925484305920792, 0.5462742152960396};
constexpr double kC3[7] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                           0.3731763325901154, -0.4570457994644658, 1.445305721320277,
                           -0.5900435899266435};

int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }

void sh_basis(const Vec3& dir, int degree, double* b) {
    double x = dir[0], y = dir[1], z = dir[2];
    b[0] = kC0;
    if (degree < 1) return;
    b[1] = -kC1 * y;
    b[2] = kC1 * z;
    b[3] = -kC1 * x;
    if (degree < 2) return;
    double xx = x * x, yy = y * y, zz = z * z;
    b[4] = kC2[0] * x * y;
    b[5] = kC2[1] * y * z;
    b[6] = kC2[2] * (2 * zz - xx - yy);
    b[7] = kC2[3] * x * z;
    b[8] = kC2[4] * (xx - yy);
    if (degree < 3) return;
    b[9] = kC3[0] * y * (3 * xx - yy);
    b[10] = kC3[1] * x * y * z;
    b[11] = kC3[2] * y * (4 * zz - xx - yy);
    b[12] = kC3[3] * z * (2 * zz - 3 * xx - 3 * yy);
    b[13] = kC3[4] * x * (4 * zz - xx - yy);
    b[14] = kC3[5] * z * (xx - yy);
    b[15] = kC3[6] * x * (xx - 3 * yy);
}

// d(basis_k)/d(dir) for every active coefficient.
void sh_basis_dir_grad(const Vec3& dir, int degree, double (*db)[3]) {
    double x = dir[0], y = dir[1], z = dir[2];
    db[0][0] = db[0][1] = db[0][2] = 0;
    if (degree < 1) return;
    db[1][0] = 0;
    db[1][1] = -kC1;
    db[1][2] = 0;
    db[2][0] = 0;
    db[2][1] = 0;
    db[2][2] = kC1;
    db[3][0] = -kC1;
    db[3][1] = 0;
    db[3][2] = 0;
    if (degree < 2) return;
    double xx = x * x, yy = y * y, zz = z * z;
    db[4][0] = kC2[0] * y;
    db[4][1] = kC2[0] * x;
    db[4][2] = 0;
    db[5][0] = 0;
    db[5][1] = kC2[1] * z;
    db[5][2] = kC2[1] * y;
    db[6][0] = kC2[2] * -2 * x;
    db[6][1] = kC2[2] * -2 * y;
    db[6][2] = kC2[2] * 4 * z;
    db[7][0] = kC2[3] * z;
    db[7][1] = 0;
    db[7][2] = kC2[3] * x;
    db[8][0] = kC2[4] * 2 * x;
    db[8][1] = kC2[4] * -2 * y;
    db[8][2] = 0;
    if (degree < 3) return;
    db[9][0] = kC3[0] * 6 * x * y;
    db[9][1] = kC3[0] * (3 * xx - 3 * yy);
    db[9][2] = 0;
    db[10][0] = kC3[1] * y * z;
    db[10][1] = kC3[1] * x * z;
    db[10][2] = kC3[1] * x * y;
    db[11][0] = kC3[2] * -2 * x * y;
    db[11][1] = kC3[2] * (4 * zz - xx - 3 * yy);
    db[11][2] = kC3[2] * 8 * y * z;
    db[12][0] = kC3[3] * -6 * x * z;
    db[12][1] = kC3[3] * -6 * y * z;
    db[12][2] = kC3[3] * (6 * zz - 3 * xx - 3 * yy);
    db[13][0] = kC3[4] * (4 * zz - 3 * xx - yy);
    db[13][1] = kC3[4] * -2 * x * y;
    db[13][2] = kC3[4] * 8 * x * z;
    db[14][0] = kC3[5] * 2 * x * z;
    db[14][1] = kC3[5] * -2 * y * z;
    db[14][2] = kC3[5] * (xx - yy);
    db[15][0] = kC3[6] * (3 * xx - 3 * yy);
    db[15][1] = kC3[6] * -6 * x * y;
    db[15][2] = 0;
}

struct ChunkRows {
    int y_begin, y_end;
};

ChunkRows chunk_rows(int chunk, int height) {
    return {height * chunk / kRowChunks, height * (chunk + 1) / kRowChunks};
}

}  // namespace

Vec3 eval_sh(const std::array<double, kShValues>& sh, const Vec3& dir, int degree,
             uint8_t clamped[3]) {
    double b[16];
    int k = sh_coeff_count(degree);
    sh_basis(dir, degree, b);
    Vec3 out;
    for (int ch = 0; ch < 3; ++ch) {
        double c = 0.5;
        const double* coeffs = sh.data() + ch * kShCoeffsPerChannel;
        for (int i = 0; i < k; ++i) c += b[i] * coeffs[i];
        clamped[ch] = c < 0.0;
        out[ch] = std::max(0.0, c);
    }
    return out;
}

void ParamGrads::resize(size_t n) {
    d_position.assign(n, Vec3::Zero());
    d_log_scale.assign(n, Vec3::Zero());
    d_rotation.assign(n, Vec4::Zero());
    d_opacity_logit.assign(n, 0.0);
    d_sh.assign(n, {});
    grad2d_norm.assign(n, 0.0);
    visible.assign(n, 0);
}

std::optional<Splat2D> project_gaussian(const Gaussian& g, const CameraIntrinsics& intr,
                                        const CameraPose& pose) {
    Mat3 w = pose.rotation_matrix();
    Vec3 t = w * g.position + pose.translation;
    if (t.z() <= kZEpsilon) return std::nullopt;
    Splat2D out;
    out.depth = t.z();
    double iz = 1.0 / t.z();
    out.mean2d = Eigen::Vector2d(intr.fx * t.x() * iz + intr.cx, intr.fy * t.y() * iz + intr.cy);
    Eigen::Matrix<double, 2, 3> jm;
    jm << intr.fx * iz, 0, -intr.fx * t.x() * iz * iz,
        0, intr.fy * iz, -intr.fy * t.y() * iz * iz;
    Eigen::Matrix<double, 2, 3> tm = jm * w;
    Eigen::Matrix2d c2 = tm * covariance(g) * tm.transpose();
    c2(0, 0) += 0.3;
    c2(1, 1) += 0.3;
    out.cov2d = c2;
    return out;
}

Image3 render_forward(const SplatScene& scene, const CameraIntrinsics& intr,
                      const CameraPose& pose, const RenderOptions& opts, RenderContext& ctx) {
    if (intr.width <= 0 || intr.height <= 0 || intr.fx <= 0 || intr.fy <= 0)
        throw InvalidArgument("render: degenerate intrinsics");
    int H = intr.height, W = intr.width;
    ctx = RenderContext{};
    ctx.height = H;
    ctx.width = W;
    ctx.sh_degree = std::clamp(opts.sh_degree, 0, 3);

    Mat3 wrot = pose.rotation_matrix();
    Vec3 cam_center = pose.camera_center();
    size_t n = scene.size();

    // Project every Gaussian; keep the on-screen ones.
    std::vector<detail::VisSplat> prepared(n);
    std::vector<uint8_t> keep(n, 0);
    int prep_chunks = std::max(1, std::min<int>(64, int(n)));
    parallel_chunks(prep_chunks, [&](int chunk) {
        size_t lo = n * size_t(chunk) / size_t(prep_chunks);
        size_t hi = n * size_t(chunk + 1) / size_t(prep_chunks);
        for (size_t i = lo; i < hi; ++i) {
            const Gaussian& g = scene.gaussians[i];
            double op = sigmoid(g.opacity_logit);
            if (op < kAlphaMin) continue;
            Vec3 t = wrot * g.position + pose.translation;
            if (t.z() <= kZEpsilon) continue;

            double iz = 1.0 / t.z();
            double u = intr.fx * t.x() * iz + intr.cx;
            double v = intr.fy * t.y() * iz + intr.cy;

            Eigen::Matrix<double, 2, 3> jm;
            jm << intr.fx * iz, 0, -intr.fx * t.x() * iz * iz,
                0, intr.fy * iz, -intr.fy * t.y() * iz * iz;
            Eigen::Matrix<double, 2, 3> tm = jm * wrot;
            Eigen::Matrix2d c2 = tm * covariance(g) * tm.transpose();
            c2(0, 0) += 0.3;
            c2(1, 1) += 0.3;
            double det = c2(0, 0) * c2(1, 1) - c2(0, 1) * c2(0, 1);
            if (!(det > 0)) continue;

            detail::VisSplat s;
            s.index = uint32_t(i);
            s.depth = t.z();
            s.mean_u = u;
            s.mean_v = v;
            s.cov2d[0] = c2(0, 0);
            s.cov2d[1] = c2(0, 1);
            s.cov2d[2] = c2(1, 1);
            double inv_det = 1.0 / det;
            s.conic_a = c2(1, 1) * inv_det;
            s.conic_b = -c2(0, 1) * inv_det;
            s.conic_c = c2(0, 0) * inv_det;
            s.opacity = op;
            s.q_max = 2.0 * std::log(255.0 * op);

            // Pixels whose centers fall inside the q_max ellipse's bounding
            // box; clamp in double space before casting so extreme
            // projections cannot overflow int.
            double rx = std::sqrt(std::max(0.0, s.q_max * s.cov2d[0]));
            double ry = std::sqrt(std::max(0.0, s.q_max * s.cov2d[2]));
            double x0d = std::ceil(u - rx - 0.5), x1d = std::floor(u + rx - 0.5);
            double y0d = std::ceil(v - ry - 0.5), y1d = std::floor(v + ry - 0.5);
            if (!(x0d <= x1d) || !(y0d <= y1d)) continue;
            if (x1d < 0 || x0d > W - 1 || y1d < 0 || y0d > H - 1) continue;
            s.x0 = int(std::max(0.0, x0d));
            s.x1 = int(std::min(double(W - 1), x1d));
            s.y0 = int(std::max(0.0, y0d));
            s.y1 = int(std::min(double(H - 1), y1d));

            Vec3 delta = g.position - cam_center;
            s.dir_len = delta.norm();
            Vec3 dir = s.dir_len > 0 ? Vec3(delta / s.dir_len) : Vec3(0, 0, 1);
            s.dir[0] = dir[0];
            s.dir[1] = dir[1];
            s.dir[2] = dir[2];
            Vec3 color = eval_sh(g.sh, dir, ctx.sh_degree, s.color_clamped);
            s.color[0] = color[0];
            s.color[1] = color[1];
            s.color[2] = color[2];
            s.t_cam[0] = t.x();
            s.t_cam[1] = t.y();
            s.t_cam[2] = t.z();
            prepared[i] = s;
            keep[i] = 1;
        }
    });

    for (size_t i = 0; i < n; ++i)
        if (keep[i]) ctx.splats.push_back(prepared[i]);
    std::sort(ctx.splats.begin(), ctx.splats.end(),
              [&](const detail::VisSplat& a, const detail::VisSplat& b) {
                  if (a.depth != b.depth) return a.depth < b.depth;
                  return scene.gaussians[a.index].id < scene.gaussians[b.index].id;
              });

    // Slot capacity per pixel = bounding-box coverage (a superset of the
    // live entries, so the fill pass never reallocates).
    size_t n_pixels = size_t(H) * W;
    ctx.entry_offset.assign(n_pixels + 1, 0);
    ctx.entry_count.assign(n_pixels, 0);
    ctx.final_T.assign(n_pixels, 1.0);
    parallel_chunks(kRowChunks, [&](int chunk) {
        auto [yb, ye] = chunk_rows(chunk, H);
        for (const auto& s : ctx.splats) {
            int y0 = std::max(s.y0, yb), y1 = std::min(s.y1, ye - 1);
            for (int y = y0; y <= y1; ++y)
                for (int x = s.x0; x <= s.x1; ++x)
                    ctx.entry_offset[size_t(y) * W + x + 1] += 1;
        }
    });
    for (size_t p = 0; p < n_pixels; ++p) ctx.entry_offset[p + 1] += ctx.entry_offset[p];
    ctx.entries.resize(ctx.entry_offset[n_pixels]);

    // Fill per-pixel entries; splats are visited in depth order, so each
    // pixel's list is already sorted front to back.
    parallel_chunks(kRowChunks, [&](int chunk) {
        auto [yb, ye] = chunk_rows(chunk, H);
        for (uint32_t vi = 0; vi < ctx.splats.size(); ++vi) {
            const auto& s = ctx.splats[vi];
            int y0 = std::max(s.y0, yb), y1 = std::min(s.y1, ye - 1);
            for (int y = y0; y <= y1; ++y) {
                double dy = y + 0.5 - s.mean_v;
                for (int x = s.x0; x <= s.x1; ++x) {
                    double dx = x + 0.5 - s.mean_u;
                    double q = s.conic_a * dx * dx + 2 * s.conic_b * dx * dy +
                               s.conic_c * dy * dy;
                    if (q > s.q_max) continue;
                    double alpha_raw = s.opacity * std::exp(-0.5 * q);
                    size_t p = size_t(y) * W + x;
                    detail::PixelEntry& e =
                        ctx.entries[ctx.entry_offset[p] + ctx.entry_count[p]++];
                    e.vi = vi;
                    e.alpha_capped = alpha_raw > kAlphaCap;
                    e.alpha = e.alpha_capped ? kAlphaCap : alpha_raw;
                }
            }
        }
    });

    // Front-to-back compositing; per-entry transmittance is kept for the
    // backward pass.
    Image3 img(H, W);
    parallel_chunks(kRowChunks, [&](int chunk) {
        auto [yb, ye] = chunk_rows(chunk, H);
        for (int y = yb; y < ye; ++y)
            for (int x = 0; x < W; ++x) {
                size_t p = size_t(y) * W + x;
                double T = 1.0;
                double rgb[3] = {0, 0, 0};
                uint32_t off = ctx.entry_offset[p];
                for (uint32_t k = 0; k < ctx.entry_count[p]; ++k) {
                    detail::PixelEntry& e = ctx.entries[off + k];
                    e.T = T;
                    const auto& s = ctx.splats[e.vi];
                    double w = e.alpha * T;
                    rgb[0] += s.color[0] * w;
                    rgb[1] += s.color[1] * w;
                    rgb[2] += s.color[2] * w;
                    T *= 1.0 - e.alpha;
                }
                ctx.final_T[p] = T;
                double* out = img.px(y, x);
                for (int ch = 0; ch < 3; ++ch) out[ch] = rgb[ch] + opts.background[ch] * T;
            }
    });
    return img;
}

Image3 render(const SplatScene& scene, const CameraIntrinsics& intr, const CameraPose& pose,
              const RenderOptions& opts) {
    RenderContext ctx;
    return render_forward(scene, intr, pose, opts, ctx);
}

ParamGrads render_backward_ctx(const SplatScene& scene, const CameraIntrinsics& intr,
                               const CameraPose& pose, const RenderOptions& opts,
                               const Image3& grad_image, const RenderContext& ctx) {
    if (grad_image.height != ctx.height || grad_image.width != ctx.width)
        throw InvalidArgument("render_backward: grad_image shape differs from the forward pass");
    ParamGrads grads;
    grads.resize(scene.size());
    size_t nv = ctx.splats.size();
    if (nv == 0) return grads;
    int H = ctx.height, W = ctx.width;

    // Per-chunk slots: [du, dv, d_conic_a, d_conic_b, d_conic_c, dr, dg, db,
    // d_opacity] per visible splat, reduced in fixed chunk order below.
    std::vector<std::vector<double>> chunk_acc(kRowChunks);
    parallel_chunks(kRowChunks, [&](int chunk) {
        auto& acc = chunk_acc[size_t(chunk)];
        acc.assign(nv * 9, 0.0);
        auto [yb, ye] = chunk_rows(chunk, H);
        for (int y = yb; y < ye; ++y)
            for (int x = 0; x < W; ++x) {
                size_t p = size_t(y) * W + x;
                const double* gc = grad_image.px(y, x);
                if (gc[0] == 0 && gc[1] == 0 && gc[2] == 0) continue;
                uint32_t off = ctx.entry_offset[p];
                uint32_t cnt = ctx.entry_count[p];
                if (cnt == 0) continue;
                // Suffix light: contributions behind the current entry plus
                // the background term, needed for d(pixel)/d(alpha).
                double s_r = opts.background[0] * ctx.final_T[p];
                double s_g = opts.background[1] * ctx.final_T[p];
                double s_b = opts.background[2] * ctx.final_T[p];
                for (uint32_t k = cnt; k-- > 0;) {
                    const detail::PixelEntry& e = ctx.entries[off + k];
                    const auto& s = ctx.splats[e.vi];
                    double* a = acc.data() + size_t(e.vi) * 9;
                    double w = e.alpha * e.T;
                    a[5] += gc[0] * w;
                    a[6] += gc[1] * w;
                    a[7] += gc[2] * w;
                    if (!e.alpha_capped) {
                        double inv_om = 1.0 / (1.0 - e.alpha);
                        double d_alpha = gc[0] * (s.color[0] * e.T - s_r * inv_om) +
                                         gc[1] * (s.color[1] * e.T - s_g * inv_om) +
                                         gc[2] * (s.color[2] * e.T - s_b * inv_om);
                        a[8] += d_alpha * (e.alpha / s.opacity);
                        double d_q = d_alpha * e.alpha * -0.5;
                        double dx = x + 0.5 - s.mean_u;
                        double dy = y + 0.5 - s.mean_v;
                        a[2] += d_q * dx * dx;
                        a[3] += d_q * 2 * dx * dy;
                        a[4] += d_q * dy * dy;
                        double qx = 2 * (s.conic_a * dx + s.conic_b * dy);
                        double qy = 2 * (s.conic_b * dx + s.conic_c * dy);
                        a[0] -= d_q * qx;
                        a[1] -= d_q * qy;
                    }
                    s_r += s.color[0] * w;
                    s_g += s.color[1] * w;
                    s_b += s.color[2] * w;
                }
            }
    });
    std::vector<double> acc(nv * 9, 0.0);
    for (int c = 0; c < kRowChunks; ++c)
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += chunk_acc[size_t(c)][i];

    Mat3 wrot = pose.rotation_matrix();
    int fin_chunks = std::max(1, std::min<int>(64, int(nv)));
    parallel_chunks(fin_chunks, [&](int chunk) {
        size_t lo = nv * size_t(chunk) / size_t(fin_chunks);
        size_t hi = nv * size_t(chunk + 1) / size_t(fin_chunks);
        for (size_t v = lo; v < hi; ++v) {
            const auto& s = ctx.splats[v];
            const Gaussian& g = scene.gaussians[s.index];
            const double* a = acc.data() + v * 9;
            size_t i = s.index;
            grads.visible[i] = 1;

            double gu = a[0], gv = a[1];
            grads.grad2d_norm[i] = std::hypot(gu * W / 2.0, gv * H / 2.0);

            // Opacity: alpha = sigmoid(logit) * exp(-q/2).
            grads.d_opacity_logit[i] = a[8] * s.opacity * (1.0 - s.opacity);

            // Color -> SH coefficients and view direction.
            double b[16];
            double db[16][3];
            Vec3 dir(s.dir[0], s.dir[1], s.dir[2]);
            int kc = sh_coeff_count(ctx.sh_degree);
            sh_basis(dir, ctx.sh_degree, b);
            sh_basis_dir_grad(dir, ctx.sh_degree, db);
            Vec3 g_dir = Vec3::Zero();
            for (int ch = 0; ch < 3; ++ch) {
                if (s.color_clamped[ch]) continue;
                double gch = a[5 + ch];
                if (gch == 0) continue;
                const double* coeffs = g.sh.data() + ch * kShCoeffsPerChannel;
                for (int k = 0; k < kc; ++k) {
                    grads.d_sh[i][size_t(ch * kShCoeffsPerChannel + k)] = gch * b[k];
                    g_dir[0] += gch * coeffs[k] * db[k][0];
                    g_dir[1] += gch * coeffs[k] * db[k][1];
                    g_dir[2] += gch * coeffs[k] * db[k][2];
                }
            }
            Vec3 g_pos = Vec3::Zero();
            if (s.dir_len > 0)
                g_pos += (g_dir - dir * dir.dot(g_dir)) / s.dir_len;

            // Conic -> 2D covariance: Lambda = Sigma2d^-1, so
            // dL/dSigma2d = -Lambda G Lambda.
            Eigen::Matrix2d lam;
            lam << s.conic_a, s.conic_b, s.conic_b, s.conic_c;
            Eigen::Matrix2d g_lam;
            g_lam << a[2], a[3] / 2.0, a[3] / 2.0, a[4];
            Eigen::Matrix2d g_sigma2 = -lam * g_lam * lam;

            // Sigma2d = T Sigma3 T^T with T = J W.
            Vec3 scale = g.scale();
            Vec4 qn = normalized_quat(g.rotation);
            Mat3 rot = quat_to_matrix(qn);
            Mat3 m = rot * scale.asDiagonal();
            Mat3 sigma3 = m * m.transpose();
            double tx = s.t_cam[0], ty = s.t_cam[1], tz = s.t_cam[2];
            double iz = 1.0 / tz;
            Eigen::Matrix<double, 2, 3> jm;
            jm << intr.fx * iz, 0, -intr.fx * tx * iz * iz,
                0, intr.fy * iz, -intr.fy * ty * iz * iz;
            Eigen::Matrix<double, 2, 3> tm = jm * wrot;
            Mat3 g_sigma3 = tm.transpose() * g_sigma2 * tm;
            Eigen::Matrix<double, 2, 3> g_tm = 2.0 * g_sigma2 * tm * sigma3;
            Eigen::Matrix<double, 2, 3> g_jm = g_tm * wrot.transpose();

            // Camera-frame center: via the projected mean and via J.
            Vec3 g_t(gu * intr.fx * iz, gv * intr.fy * iz,
                     -gu * intr.fx * tx * iz * iz - gv * intr.fy * ty * iz * iz);
            g_t[0] += g_jm(0, 2) * (-intr.fx * iz * iz);
            g_t[1] += g_jm(1, 2) * (-intr.fy * iz * iz);
            g_t[2] += g_jm(0, 0) * (-intr.fx * iz * iz) + g_jm(1, 1) * (-intr.fy * iz * iz) +
                      g_jm(0, 2) * (2 * intr.fx * tx * iz * iz * iz) +
                      g_jm(1, 2) * (2 * intr.fy * ty * iz * iz * iz);
            g_pos += wrot.transpose() * g_t;
            grads.d_position[i] = g_pos;

            // Sigma3 = M M^T, M = R diag(scale).
            Mat3 g_m = 2.0 * g_sigma3 * m;
            Mat3 rt_gm = rot.transpose() * g_m;
            for (int k = 0; k < 3; ++k)
                grads.d_log_scale[i][k] = rt_gm(k, k) * scale[k];
            Mat3 g_rot = g_m * scale.asDiagonal();

            // Rotation matrix -> quaternion (then through normalization).
            double qw = qn[0], qx = qn[1], qy = qn[2], qz = qn[3];
            Vec4 g_qn;
            g_qn[0] = 2 * (g_rot(0, 1) * -qz + g_rot(0, 2) * qy + g_rot(1, 0) * qz +
                           g_rot(1, 2) * -qx + g_rot(2, 0) * -qy + g_rot(2, 1) * qx);
            g_qn[1] = 2 * (g_rot(0, 1) * qy + g_rot(0, 2) * qz + g_rot(1, 0) * qy +
                           g_rot(1, 1) * -2 * qx + g_rot(1, 2) * -qw + g_rot(2, 0) * qz +
                           g_rot(2, 1) * qw + g_rot(2, 2) * -2 * qx);
            g_qn[2] = 2 * (g_rot(0, 0) * -2 * qy + g_rot(0, 1) * qx + g_rot(0, 2) * qw +
                           g_rot(1, 0) * qx + g_rot(1, 2) * qz + g_rot(2, 0) * -qw +
                           g_rot(2, 1) * qz + g_rot(2, 2) * -2 * qy);
            g_qn[3] = 2 * (g_rot(0, 0) * -2 * qz + g_rot(0, 1) * -qw + g_rot(0, 2) * qx +
                           g_rot(1, 0) * qw + g_rot(1, 1) * -2 * qz + g_rot(1, 2) * qy +
                           g_rot(2, 0) * qx + g_rot(2, 1) * qy);
            double qnorm = g.rotation.norm();
            if (qnorm > 1e-12)
                grads.d_rotation[i] = (g_qn - qn * qn.dot(g_qn)) / qnorm;
        }
    });
    return grads;
}

ParamGrads render_backward(const SplatScene& scene, const CameraIntrinsics& intr,
                           const CameraPose& pose, const RenderOptions& opts,
                           const Image3& grad_image) {
    RenderContext ctx;
    render_forward(scene, intr, pose, opts, ctx);
    return render_backward_ctx(scene, intr, pose, opts, grad_image, ctx);
}

}  // namespace textsplat
