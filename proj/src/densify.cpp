#include "textsplat/densify.hpp"

#include <algorithm>
#include <cmath>

#include "textsplat/common.hpp"

namespace textsplat {

DensifyPlan densify_counts(const std::vector<int>& visibility_counts, int n_max) {
    if (visibility_counts.empty())
        throw InvalidArgument("densify_counts: empty visibility list");
    if (n_max < 1) throw InvalidArgument(cat("densify_counts: n_max must be >= 1, got ", n_max));
    for (int c : visibility_counts)
        if (c < 1)
            throw InvalidArgument(cat("densify_counts: visibility count ", c, " must be >= 1"));

    auto [lo, hi] = std::minmax_element(visibility_counts.begin(), visibility_counts.end());
    int64_t c_min = *lo, c_max = *hi;

    DensifyPlan plan;
    plan.n_max = n_max;
    plan.counts.reserve(visibility_counts.size());
    for (int c : visibility_counts) {
        if (c_min == c_max) {
            // All counts equal: the normalization is undefined, so nothing
            // stands out as under-observed and no copies are made.
            plan.counts.push_back(1);
            continue;
        }
        // The normalized inverse count (1/c - 1/c_max) / (1/c_min - 1/c_max)
        // is the exact rational c_min*(c_max - c) / (c*(c_max - c_min)), so
        // the target count and its half-to-even rounding can be computed on
        // integers instead of trusting double rounding near the ties.
        __int128 num = __int128(c_min) * (c_max - c) * (n_max - 1);
        __int128 den = __int128(c) * (c_max - c_min);
        __int128 p = num + den;  // target = p / den, already in [1, n_max]
        __int128 q = p / den, r = p % den;
        if (2 * r > den)
            ++q;
        else if (2 * r == den && (q & 1))
            ++q;
        plan.counts.push_back(std::clamp(int(q), 1, n_max));
    }
    return plan;
}

std::vector<Gaussian> split_gaussian(const Gaussian& g, int n, Rng& rng) {
    if (n < 1) throw InvalidArgument(cat("split_gaussian: n must be >= 1, got ", n));
    if (n == 1) return {g};
    std::vector<Gaussian> out;
    out.reserve(size_t(n));
    double log_shrink = std::log(1.6);
    for (int k = 0; k < n; ++k) {
        Gaussian child = g;
        child.position = sample_position(g, rng);
        child.log_scale = g.log_scale.array() - log_shrink;
        out.push_back(std::move(child));
    }
    return out;
}

SplatScene densify_text(const SplatScene& scene, const DensifyPlan& plan, const Rng& base_rng) {
    size_t text_count = scene.count_region(Region::Text);
    if (plan.counts.size() != text_count)
        throw InvalidArgument(cat("densify_text: plan covers ", plan.counts.size(),
                                  " Gaussians but the scene has ", text_count, " text Gaussians"));

    SplatScene out;
    out.scene_extent = scene.scene_extent;
    out.next_id = scene.next_id;
    size_t text_idx = 0;
    for (const auto& g : scene.gaussians) {
        if (g.region != Region::Text) {
            out.gaussians.push_back(g);
            continue;
        }
        int n = plan.counts[text_idx++];
        Rng rng = base_rng.fork(uint64_t(g.id));
        for (auto& child : split_gaussian(g, n, rng)) {
            if (n > 1) child.id = out.fresh_id();
            out.gaussians.push_back(std::move(child));
        }
    }
    return out;
}

}  // namespace textsplat
