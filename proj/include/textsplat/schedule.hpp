#pragma once

#include "textsplat/splats.hpp"

namespace textsplat {

// Position learning-rate plan: a log-linear base decay that starts when the
// joint phase begins, modulated per region by a sigmoid ramp (text) or a
// constant (non-text).
struct ScheduleConfig {
    double alpha = 0.5;    // ceiling of the region factor
    double beta = 5e-4;    // sigmoid steepness per iteration
    double gamma = 15000;  // sigmoid midpoint iteration
    int t1 = 3000;         // iterations in the text-only phase
    int t2 = 30000;        // total iterations
    double base_lr_init = 1.6e-4;
    double base_lr_final = 1.6e-6;
    int max_steps = -1;  // base-decay horizon; < 0 means t2 - t1
    double scene_extent = 1.0;

    int decay_steps() const { return max_steps >= 0 ? max_steps : t2 - t1; }
    void validate() const;  // throws InvalidArgument when an invariant fails
};

// Map the reference curve onto a shorter run: gamma keeps its relative
// position inside the joint phase and beta widens by the same time
// compression, so the ramp sweeps the same values. t2_new == t1_new is
// allowed (the joint phase is empty and the ramp is never evaluated).
ScheduleConfig scaled_schedule(ScheduleConfig ref, int t1_new, int t2_new);

// Region factor: text ramps alpha / (1 + exp(-beta (t - gamma))),
// non-text holds alpha.
double lr_factor(double t, Region region, const ScheduleConfig& cfg);

// Base decay shifted to start at t1: log-linear from base_lr_init to
// base_lr_final over decay_steps(), clamped beyond, times scene_extent.
double base_position_lr(double t, const ScheduleConfig& cfg);

// lr_factor * base_position_lr for t >= t1; zero before that (text
// positions are locked during the first phase and non-text Gaussians are
// not optimized at all).
double effective_position_lr(double t, Region region, const ScheduleConfig& cfg);

}  // namespace textsplat
