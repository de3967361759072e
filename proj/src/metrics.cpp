#include "textsplat/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "textsplat/common.hpp"

namespace textsplat {

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1*L)^2 with L = 1
constexpr double kC2 = 0.03 * 0.03;

const std::array<double, kWin>& window() {
    static const std::array<double, kWin> w = [] {
        std::array<double, kWin> k{};
        double sum = 0;
        for (int i = 0; i < kWin; ++i) {
            double d = i - (kWin - 1) / 2.0;
            k[size_t(i)] = std::exp(-d * d / (2 * kSigma * kSigma));
            sum += k[size_t(i)];
        }
        for (auto& v : k) v /= sum;
        return k;
    }();
    return w;
}

// Per-channel planes as H*W vectors to keep the convolutions simple.
using Plane = std::vector<double>;

// Zero-padded same-size separable convolution with the SSIM window. The
// kernel is symmetric, so this operator is its own transpose — the backward
// pass reuses it directly.
Plane conv_same(const Plane& src, int h, int w) {
    const auto& k = window();
    int r = kWin / 2;
    Plane tmp(size_t(h) * w, 0.0), out(size_t(h) * w, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            int lo = std::max(-r, -x), hi = std::min(r, w - 1 - x);
            const double* row = src.data() + size_t(y) * w;
            for (int d = lo; d <= hi; ++d) acc += k[size_t(d + r)] * row[x + d];
            tmp[size_t(y) * w + x] = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            int lo = std::max(-r, -y), hi = std::min(r, h - 1 - y);
            for (int d = lo; d <= hi; ++d) acc += k[size_t(d + r)] * tmp[size_t(y + d) * w + x];
            out[size_t(y) * w + x] = acc;
        }
    return out;
}

Plane channel_of(const Image3& img, int ch) {
    Plane p(img.pixel_count());
    for (size_t i = 0; i < p.size(); ++i) p[i] = img.data[i * 3 + size_t(ch)];
    return p;
}

void require_same_shape(const Image3& a, const Image3& b, const char* who) {
    if (!a.same_shape(b))
        throw InvalidArgument(cat(who, ": image shapes differ (", a.width, "x", a.height,
                                  " vs ", b.width, "x", b.height, ")"));
}

}  // namespace

double psnr(const Image3& a, const Image3& b) {
    require_same_shape(a, b, "psnr");
    double mse = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        mse += d * d;
    }
    mse /= double(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

SsimResult ssim_with_grad(const Image3& a, const Image3& b) {
    require_same_shape(a, b, "ssim");
    int h = a.height, w = a.width;
    size_t n = size_t(h) * w;

    SsimResult res;
    res.grad_a = Image3(h, w, 0.0);
    double total = 0;

    for (int ch = 0; ch < 3; ++ch) {
        Plane x = channel_of(a, ch), y = channel_of(b, ch);
        Plane x2(n), y2(n), xy(n);
        for (size_t i = 0; i < n; ++i) {
            x2[i] = x[i] * x[i];
            y2[i] = y[i] * y[i];
            xy[i] = x[i] * y[i];
        }
        Plane mx = conv_same(x, h, w), my = conv_same(y, h, w);
        Plane mx2 = conv_same(x2, h, w), my2 = conv_same(y2, h, w), mxy = conv_same(xy, h, w);

        // Per-pixel partials of the SSIM map with respect to the window
        // statistics; pushed back through the (self-adjoint) convolution.
        Plane d_mu(n), d_sx(n), d_sxy(n);
        for (size_t i = 0; i < n; ++i) {
            double sx = mx2[i] - mx[i] * mx[i];
            double sy = my2[i] - my[i] * my[i];
            double sxy = mxy[i] - mx[i] * my[i];
            double a1 = 2 * mx[i] * my[i] + kC1;
            double a2 = 2 * sxy + kC2;
            double b1 = mx[i] * mx[i] + my[i] * my[i] + kC1;
            double b2 = sx + sy + kC2;
            double s = (a1 * a2) / (b1 * b2);
            total += s;

            double ds_dmux = 2 * my[i] * a2 / (b1 * b2) - 2 * mx[i] * s / b1;
            double ds_dsx = -s / b2;
            double ds_dsxy = 2 * a1 / (b1 * b2);
            // sigma_x^2 = m(x^2) - mu_x^2 and sigma_xy = m(xy) - mu_x mu_y
            // fold extra -2 mu_x and -mu_y terms into the mu_x channel.
            d_mu[i] = ds_dmux - 2 * mx[i] * ds_dsx - my[i] * ds_dsxy;
            d_sx[i] = ds_dsx;    // reaches x via m(x^2), chain 2x
            d_sxy[i] = ds_dsxy;  // reaches x via m(xy), chain y
        }

        Plane g_mu = conv_same(d_mu, h, w);
        Plane g_sx = conv_same(d_sx, h, w);
        Plane g_sxy = conv_same(d_sxy, h, w);
        double inv_count = 1.0 / (double(n) * 3.0);
        for (size_t i = 0; i < n; ++i) {
            double g = g_mu[i] + 2 * x[i] * g_sx[i] + y[i] * g_sxy[i];
            res.grad_a.data[i * 3 + size_t(ch)] = g * inv_count;
        }
    }
    res.value = total / (double(n) * 3.0);
    return res;
}

double ssim(const Image3& a, const Image3& b) {
    require_same_shape(a, b, "ssim");
    int h = a.height, w = a.width;
    size_t n = size_t(h) * w;
    double total = 0;
    for (int ch = 0; ch < 3; ++ch) {
        Plane x = channel_of(a, ch), y = channel_of(b, ch);
        Plane x2(n), y2(n), xy(n);
        for (size_t i = 0; i < n; ++i) {
            x2[i] = x[i] * x[i];
            y2[i] = y[i] * y[i];
            xy[i] = x[i] * y[i];
        }
        Plane mx = conv_same(x, h, w), my = conv_same(y, h, w);
        Plane mx2 = conv_same(x2, h, w), my2 = conv_same(y2, h, w), mxy = conv_same(xy, h, w);
        for (size_t i = 0; i < n; ++i) {
            double sx = mx2[i] - mx[i] * mx[i];
            double sy = my2[i] - my[i] * my[i];
            double sxy = mxy[i] - mx[i] * my[i];
            total += (2 * mx[i] * my[i] + kC1) * (2 * sxy + kC2) /
                     ((mx[i] * mx[i] + my[i] * my[i] + kC1) * (sx + sy + kC2));
        }
    }
    return total / (double(n) * 3.0);
}

}  // namespace textsplat
