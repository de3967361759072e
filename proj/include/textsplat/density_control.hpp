#pragma once

#include <cstdint>
#include <vector>

#include "textsplat/adam.hpp"
#include "textsplat/render.hpp"
#include "textsplat/rng.hpp"
#include "textsplat/splats.hpp"

namespace textsplat {

struct DensityControlConfig {
    int interval = 100;  // steps between adaptation passes
    int start = 500;     // first eligible iteration
    int stop = 15000;    // exclusive end of the adaptation window
    double grad_threshold = 2e-4;
    double opacity_prune = 0.005;
    int opacity_reset_interval = 3000;
    double percent_dense = 0.01;  // of scene extent: clone below, split at or above

    void validate() const;
};

// Screen-space gradient pressure accumulated between adaptation passes.
struct DensityStats {
    std::vector<double> grad_sum;     // sum of NDC-scaled 2D gradient norms
    std::vector<uint32_t> vis_count;  // passes where the splat was visible

    void init(size_t n);
    void accumulate(const ParamGrads& grads);
};

struct DensityControlResult {
    int cloned = 0;
    int split = 0;
    int pruned = 0;
};

// One adaptation pass: high-pressure small splats are cloned in place,
// high-pressure large ones are replaced by two children sampled inside the
// parent (scales shrunk by 1.6), then low-opacity splats are pruned.
// Optimizer rows follow the scene exactly; new rows start at zero moments.
// Child positions draw from rng forked by the parent id, so results do not
// depend on scene order.
DensityControlResult density_control_step(SplatScene& scene, OptimizerState& state,
                                          const DensityStats& stats,
                                          const DensityControlConfig& cfg, Rng& rng);

// Clamp every opacity to at most `ceiling` and clear opacity moments so
// the optimizer has to re-justify each splat's presence.
void reset_opacity(SplatScene& scene, OptimizerState& state, double ceiling = 0.01);

}  // namespace textsplat
