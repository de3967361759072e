#include "textsplat/losses.hpp"

#include <cmath>

#include "textsplat/common.hpp"
#include "textsplat/metrics.hpp"

namespace textsplat {

namespace {

void require_same_shape(const Image3& a, const Image3& b) {
    if (a.height != b.height || a.width != b.width)
        throw InvalidArgument(cat("loss: image shapes differ (", a.height, "x", a.width, " vs ",
                                  b.height, "x", b.width, ")"));
}

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

}  // namespace

LossResult masked_l1_loss(const Image3& rendered, const Image3& target, const MaskGrid* mask) {
    require_same_shape(rendered, target);
    if (mask && (mask->height != rendered.height || mask->width != rendered.width))
        throw InvalidArgument(cat("loss: mask shape differs (", mask->height, "x", mask->width,
                                  " vs ", rendered.height, "x", rendered.width, ")"));
    LossResult out;
    out.grad = Image3(rendered.height, rendered.width);
    double inv_n = 1.0 / (double(rendered.height) * rendered.width * 3);
    double sum = 0;
    for (int y = 0; y < rendered.height; ++y)
        for (int x = 0; x < rendered.width; ++x) {
            if (mask && !mask->at(y, x)) continue;
            const double* r = rendered.px(y, x);
            const double* t = target.px(y, x);
            double* g = out.grad.px(y, x);
            for (int ch = 0; ch < 3; ++ch) {
                double d = r[ch] - t[ch];
                sum += std::abs(d);
                g[ch] = sign(d) * inv_n;
            }
        }
    out.loss = sum * inv_n;
    return out;
}

LossResult full_loss(const Image3& rendered, const Image3& target, double lambda) {
    require_same_shape(rendered, target);
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw InvalidArgument(cat("loss: lambda must lie in [0, 1], got ", lambda));
    LossResult l1 = masked_l1_loss(rendered, target, nullptr);
    if (lambda == 0.0) return l1;
    SsimResult ss = ssim_with_grad(rendered, target);
    LossResult out;
    out.loss = (1.0 - lambda) * l1.loss + lambda * (1.0 - ss.value);
    out.grad = Image3(rendered.height, rendered.width);
    for (int y = 0; y < rendered.height; ++y)
        for (int x = 0; x < rendered.width; ++x) {
            const double* gl = l1.grad.px(y, x);
            const double* gs = ss.grad_a.px(y, x);
            double* g = out.grad.px(y, x);
            for (int ch = 0; ch < 3; ++ch)
                g[ch] = (1.0 - lambda) * gl[ch] - lambda * gs[ch];
        }
    return out;
}

}  // namespace textsplat
