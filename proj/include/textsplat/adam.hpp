#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "textsplat/render.hpp"
#include "textsplat/splats.hpp"

namespace textsplat {

// Adaptive-moment hyperparameters plus the fixed per-class learning rates.
// Positions use region-dependent rates passed per step instead.
struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-15;
    double lr_opacity = 0.05;
    double lr_log_scale = 5e-3;
    double lr_rotation = 1e-3;
    double lr_sh_dc = 2.5e-3;
    double lr_sh_rest = 2.5e-3 / 20.0;
};

// First/second moments for one Gaussian, shaped like its parameters.
struct MomentRow {
    Vec3 m_position = Vec3::Zero(), v_position = Vec3::Zero();
    Vec3 m_log_scale = Vec3::Zero(), v_log_scale = Vec3::Zero();
    Vec4 m_rotation = Vec4::Zero(), v_rotation = Vec4::Zero();
    double m_opacity = 0, v_opacity = 0;
    std::array<double, kShValues> m_sh{}, v_sh{};
};

struct OptimizerState {
    AdamConfig cfg;
    std::vector<MomentRow> rows;
    // Bias correction tracks how many updates each class has received.
    int64_t step_position = 0;
    int64_t step_log_scale = 0;
    int64_t step_rotation = 0;
    int64_t step_opacity = 0;
    int64_t step_sh = 0;

    void init(size_t n) { rows.assign(n, MomentRow{}); }
};

// One optimizer step over every Gaussian. Positions advance with the
// region's learning rate; a zero position rate freezes positions and their
// moments bit-exactly. SH bands that never receive gradients stay put on
// their own (zero moments), so no band masking is needed here.
void adam_step(SplatScene& scene, OptimizerState& state, const ParamGrads& grads,
               double lr_position_text, double lr_position_nontext);

}  // namespace textsplat
