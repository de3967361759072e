#pragma once

#include <vector>

#include "textsplat/rng.hpp"
#include "textsplat/splats.hpp"

namespace textsplat {

// Per-Gaussian duplicate counts for the one-time text densification.
struct DensifyPlan {
    std::vector<int> counts;  // N_i, aligned with the text Gaussians in scene order
    int n_max = 1;
};

// Visibility-driven duplicate counts: rarely-seen points get up to n_max
// copies, well-covered ones stay single. Counts are the inverse visibility
// 1/c_i min-max normalized onto [1, n_max], rounded half-to-even; if every
// c_i is equal the normalization is degenerate and all counts are 1.
DensifyPlan densify_counts(const std::vector<int>& visibility_counts, int n_max);

// n = 1 returns {g} unchanged. Otherwise n Gaussians whose positions are
// drawn from g's own distribution N(mu, Sigma), scales divided by 1.6,
// every other field (tag included) copied.
std::vector<Gaussian> split_gaussian(const Gaussian& g, int n, Rng& rng);

// Replaces every text Gaussian with its split set; non-text Gaussians pass
// through untouched. The plan must be indexed over the text Gaussians in
// scene order. Sampling is keyed per source Gaussian so the result does not
// depend on iteration order.
SplatScene densify_text(const SplatScene& scene, const DensifyPlan& plan, const Rng& base_rng);

}  // namespace textsplat
