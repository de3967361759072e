#include "textsplat/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "textsplat/common.hpp"

namespace textsplat {

void ScheduleConfig::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InvalidArgument(cat("schedule: alpha must lie in (0, 1], got ", alpha));
    if (!(beta > 0.0)) throw InvalidArgument(cat("schedule: beta must be positive, got ", beta));
    if (t1 < 0) throw InvalidArgument(cat("schedule: t1 must be non-negative, got ", t1));
    if (t2 < t1) throw InvalidArgument(cat("schedule: t2 (", t2, ") must be >= t1 (", t1, ")"));
    if (t1 < t2 && !(gamma > t1 && gamma < t2))
        throw InvalidArgument(
            cat("schedule: gamma (", gamma, ") must lie strictly between t1 (", t1, ") and t2 (",
                t2, ")"));
    if (!(base_lr_final > 0.0) || base_lr_init < base_lr_final)
        throw InvalidArgument(cat("schedule: need base_lr_init >= base_lr_final > 0, got init ",
                                  base_lr_init, ", final ", base_lr_final));
    if (t1 < t2 && decay_steps() <= 0)
        throw InvalidArgument(
            cat("schedule: decay horizon must be positive, got ", decay_steps()));
    if (!(scene_extent > 0.0))
        throw InvalidArgument(cat("schedule: scene_extent must be positive, got ", scene_extent));
}

ScheduleConfig scaled_schedule(ScheduleConfig ref, int t1_new, int t2_new) {
    if (ref.t2 <= ref.t1)
        throw InvalidArgument("schedule: reference curve must have a non-empty joint phase");
    if (t1_new < 0 || t2_new < t1_new)
        throw InvalidArgument(cat("schedule: bad target window [", t1_new, ", ", t2_new, "]"));
    double s = double(t2_new - t1_new) / double(ref.t2 - ref.t1);
    ScheduleConfig out = ref;
    out.t1 = t1_new;
    out.t2 = t2_new;
    out.max_steps = -1;
    if (s > 0.0) {
        out.gamma = t1_new + (ref.gamma - ref.t1) * s;
        out.beta = ref.beta / s;
    } else {
        // Empty joint phase: the ramp is never evaluated.
        out.gamma = t1_new;
        out.beta = ref.beta;
    }
    return out;
}

double lr_factor(double t, Region region, const ScheduleConfig& cfg) {
    if (region != Region::Text) return cfg.alpha;
    return cfg.alpha / (1.0 + std::exp(-cfg.beta * (t - cfg.gamma)));
}

double base_position_lr(double t, const ScheduleConfig& cfg) {
    double steps = double(cfg.decay_steps());
    double s = steps > 0 ? std::clamp((t - cfg.t1) / steps, 0.0, 1.0) : 1.0;
    if (s <= 0.0) return cfg.base_lr_init * cfg.scene_extent;
    if (s >= 1.0) return cfg.base_lr_final * cfg.scene_extent;
    double log_lr = (1.0 - s) * std::log(cfg.base_lr_init) + s * std::log(cfg.base_lr_final);
    return std::exp(log_lr) * cfg.scene_extent;
}

double effective_position_lr(double t, Region region, const ScheduleConfig& cfg) {
    if (t < cfg.t1) return 0.0;
    return lr_factor(t, region, cfg) * base_position_lr(t, cfg);
}

}  // namespace textsplat
