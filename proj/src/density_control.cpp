#include "textsplat/density_control.hpp"

#include <cmath>

#include "textsplat/common.hpp"

namespace textsplat {

void DensityControlConfig::validate() const {
    if (interval <= 0)
        throw InvalidArgument(cat("density control: interval must be positive, got ", interval));
    if (!(grad_threshold > 0))
        throw InvalidArgument(
            cat("density control: grad_threshold must be positive, got ", grad_threshold));
    if (!(opacity_prune > 0))
        throw InvalidArgument(
            cat("density control: opacity_prune must be positive, got ", opacity_prune));
    if (opacity_reset_interval <= 0)
        throw InvalidArgument(cat("density control: opacity_reset_interval must be positive, got ",
                                  opacity_reset_interval));
    if (!(percent_dense > 0))
        throw InvalidArgument(
            cat("density control: percent_dense must be positive, got ", percent_dense));
    if (start < 0 || stop < 0)
        throw InvalidArgument(cat("density control: window [", start, ", ", stop,
                                  ") must be non-negative"));
}

void DensityStats::init(size_t n) {
    grad_sum.assign(n, 0.0);
    vis_count.assign(n, 0);
}

void DensityStats::accumulate(const ParamGrads& grads) {
    if (grads.grad2d_norm.size() != grad_sum.size())
        throw InvalidArgument(cat("density stats: size mismatch (stats ", grad_sum.size(),
                                  ", grads ", grads.grad2d_norm.size(), ")"));
    for (size_t i = 0; i < grad_sum.size(); ++i)
        if (grads.visible[i]) {
            grad_sum[i] += grads.grad2d_norm[i];
            vis_count[i] += 1;
        }
}

DensityControlResult density_control_step(SplatScene& scene, OptimizerState& state,
                                          const DensityStats& stats,
                                          const DensityControlConfig& cfg, Rng& rng) {
    cfg.validate();
    size_t n = scene.size();
    if (stats.grad_sum.size() != n || state.rows.size() != n)
        throw InvalidArgument(cat("density control: cardinality mismatch (scene ", n, ", stats ",
                                  stats.grad_sum.size(), ", state ", state.rows.size(), ")"));

    DensityControlResult result;
    double split_scale = cfg.percent_dense * scene.scene_extent;
    std::vector<Gaussian> out_g;
    std::vector<MomentRow> out_m;
    out_g.reserve(n + n / 4);
    out_m.reserve(n + n / 4);
    int64_t next_id = scene.next_id;

    for (size_t i = 0; i < n; ++i) {
        const Gaussian& g = scene.gaussians[i];
        double avg = stats.vis_count[i] > 0 ? stats.grad_sum[i] / stats.vis_count[i] : 0.0;
        bool high = avg >= cfg.grad_threshold;
        if (high && g.scale().maxCoeff() >= split_scale) {
            Rng child_rng = rng.fork(uint64_t(g.id));
            for (int k = 0; k < 2; ++k) {
                Gaussian child = g;
                child.position = sample_position(g, child_rng);
                child.log_scale -= Vec3::Constant(std::log(1.6));
                child.id = next_id++;
                out_g.push_back(child);
                out_m.emplace_back();
            }
            result.split += 1;
        } else {
            out_g.push_back(g);
            out_m.push_back(state.rows[i]);
            if (high) {
                Gaussian copy = g;
                copy.id = next_id++;
                out_g.push_back(copy);
                out_m.emplace_back();
                result.cloned += 1;
            }
        }
    }

    std::vector<Gaussian> kept_g;
    std::vector<MomentRow> kept_m;
    kept_g.reserve(out_g.size());
    kept_m.reserve(out_m.size());
    for (size_t i = 0; i < out_g.size(); ++i) {
        if (out_g[i].opacity() < cfg.opacity_prune) {
            result.pruned += 1;
            continue;
        }
        kept_g.push_back(out_g[i]);
        kept_m.push_back(out_m[i]);
    }

    scene.gaussians = std::move(kept_g);
    scene.next_id = next_id;
    state.rows = std::move(kept_m);
    return result;
}

void reset_opacity(SplatScene& scene, OptimizerState& state, double ceiling) {
    if (!(ceiling > 0 && ceiling < 1))
        throw InvalidArgument(cat("reset_opacity: ceiling must lie in (0, 1), got ", ceiling));
    if (state.rows.size() != scene.size())
        throw InvalidArgument(cat("reset_opacity: cardinality mismatch (scene ", scene.size(),
                                  ", state ", state.rows.size(), ")"));
    for (size_t i = 0; i < scene.size(); ++i) {
        Gaussian& g = scene.gaussians[i];
        if (g.opacity() > ceiling) g.opacity_logit = logit(ceiling);
        state.rows[i].m_opacity = 0;
        state.rows[i].v_opacity = 0;
    }
}

}  // namespace textsplat
