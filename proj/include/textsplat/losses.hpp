#pragma once

#include "textsplat/image.hpp"

namespace textsplat {

// Weight of the structural term inside full_loss.
inline constexpr double kSsimLambda = 0.2;

struct LossResult {
    double loss = 0;
    Image3 grad;  // d(loss)/d(rendered), same shape as the inputs
};

// L1 restricted to mask-on pixels but normalized by the full pixel count
// (H*W*3), so sparsely covered images yield proportionally small losses.
// A null mask counts every pixel.
LossResult masked_l1_loss(const Image3& rendered, const Image3& target, const MaskGrid* mask);

// (1 - lambda) * L1 + lambda * (1 - SSIM) over the whole image.
LossResult full_loss(const Image3& rendered, const Image3& target, double lambda = kSsimLambda);

}  // namespace textsplat
