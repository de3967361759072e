#include "textsplat/adam.hpp"

#include <cmath>

#include "textsplat/common.hpp"
#include "textsplat/threading.hpp"

namespace textsplat {

namespace {

inline double adam_update(double& m, double& v, double g, double lr, double bc1, double bc2,
                          const AdamConfig& c) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g * g;
    return lr * (m / bc1) / (std::sqrt(v / bc2) + c.eps);
}

}  // namespace

void adam_step(SplatScene& scene, OptimizerState& state, const ParamGrads& grads,
               double lr_position_text, double lr_position_nontext) {
    size_t n = scene.size();
    if (state.rows.size() != n || grads.d_position.size() != n)
        throw InvalidArgument(cat("adam: cardinality mismatch (scene ", n, ", state ",
                                  state.rows.size(), ", grads ", grads.d_position.size(), ")"));
    if (lr_position_text < 0 || lr_position_nontext < 0)
        throw InvalidArgument("adam: negative position learning rate");
    const AdamConfig& c = state.cfg;

    bool any_position = lr_position_text > 0 || lr_position_nontext > 0;
    if (any_position) state.step_position += 1;
    state.step_log_scale += 1;
    state.step_rotation += 1;
    state.step_opacity += 1;
    state.step_sh += 1;

    double bc1_pos = 1.0 - std::pow(c.beta1, double(state.step_position));
    double bc2_pos = 1.0 - std::pow(c.beta2, double(state.step_position));
    double bc1_ls = 1.0 - std::pow(c.beta1, double(state.step_log_scale));
    double bc2_ls = 1.0 - std::pow(c.beta2, double(state.step_log_scale));
    double bc1_rot = 1.0 - std::pow(c.beta1, double(state.step_rotation));
    double bc2_rot = 1.0 - std::pow(c.beta2, double(state.step_rotation));
    double bc1_op = 1.0 - std::pow(c.beta1, double(state.step_opacity));
    double bc2_op = 1.0 - std::pow(c.beta2, double(state.step_opacity));
    double bc1_sh = 1.0 - std::pow(c.beta1, double(state.step_sh));
    double bc2_sh = 1.0 - std::pow(c.beta2, double(state.step_sh));

    int chunks = std::max(1, std::min<int>(64, int(n)));
    parallel_chunks(chunks, [&](int chunk) {
        size_t lo = n * size_t(chunk) / size_t(chunks);
        size_t hi = n * size_t(chunk + 1) / size_t(chunks);
        for (size_t i = lo; i < hi; ++i) {
            Gaussian& g = scene.gaussians[i];
            MomentRow& r = state.rows[i];

            double lr_pos = g.region == Region::Text ? lr_position_text : lr_position_nontext;
            if (lr_pos > 0) {
                for (int k = 0; k < 3; ++k)
                    g.position[k] -= adam_update(r.m_position[k], r.v_position[k],
                                                 grads.d_position[i][k], lr_pos, bc1_pos,
                                                 bc2_pos, c);
            }
            for (int k = 0; k < 3; ++k)
                g.log_scale[k] -= adam_update(r.m_log_scale[k], r.v_log_scale[k],
                                             grads.d_log_scale[i][k], c.lr_log_scale, bc1_ls,
                                             bc2_ls, c);
            for (int k = 0; k < 4; ++k)
                g.rotation[k] -= adam_update(r.m_rotation[k], r.v_rotation[k],
                                            grads.d_rotation[i][k], c.lr_rotation, bc1_rot,
                                            bc2_rot, c);
            g.opacity_logit -= adam_update(r.m_opacity, r.v_opacity, grads.d_opacity_logit[i],
                                           c.lr_opacity, bc1_op, bc2_op, c);
            for (int ch = 0; ch < 3; ++ch)
                for (int k = 0; k < kShCoeffsPerChannel; ++k) {
                    size_t s = size_t(ch * kShCoeffsPerChannel + k);
                    double lr = k == 0 ? c.lr_sh_dc : c.lr_sh_rest;
                    g.sh[s] -= adam_update(r.m_sh[s], r.v_sh[s], grads.d_sh[i][s], lr, bc1_sh,
                                           bc2_sh, c);
                }
        }
    });
}

}  // namespace textsplat
