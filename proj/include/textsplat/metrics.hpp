#pragma once

#include "textsplat/image.hpp"

namespace textsplat {

// 10*log10(1/MSE) over all pixels and channels; +infinity when identical.
double psnr(const Image3& a, const Image3& b);

// Mean SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, dynamic
// range 1, computed per channel with zero-padded same-size convolution and
// averaged over every pixel and channel.
double ssim(const Image3& a, const Image3& b);

struct SsimResult {
    double value = 0;
    Image3 grad_a;  // d(mean SSIM)/d(a)
};
SsimResult ssim_with_grad(const Image3& a, const Image3& b);

}  // namespace textsplat
