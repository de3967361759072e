#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "textsplat/colmap_io.hpp"
#include "textsplat/image.hpp"
#include "textsplat/splats.hpp"

namespace textsplat {

// Disjoint cover of all point ids by region.
struct PointPartition {
    std::set<int64_t> text_ids;
    std::set<int64_t> nontext_ids;

    bool is_text(int64_t id) const { return text_ids.count(id) != 0; }
};

// Morphological dilation with a circular structuring element whose diameter
// is round(diameter_frac * width) pixels; a diameter <= 1 kernel is the
// identity. Output is a superset of the input.
MaskGrid dilate_mask(const MaskGrid& mask, double diameter_frac);

// For each point, counts the views in its visibility set where the
// projection lands in bounds and the (already dilated) mask is set at
// (floor(u), floor(v)); the point is text iff that count >= tau.
// Out-of-bounds or behind-camera projections contribute nothing.
PointPartition classify_points(const std::vector<SparsePoint>& points,
                               const std::map<int32_t, CameraIntrinsics>& intrinsics,
                               const std::vector<CameraPose>& poses,
                               const std::map<int32_t, MaskGrid>& masks, int tau);

// One Gaussian per point: position copied, degree-0 SH from the point's
// RGB, opacity 0.1 pre-activation, isotropic scale = mean distance to the
// 3 nearest points clamped to [1e-7, extent], region tag from the
// partition. Ids are the point ids.
SplatScene init_gaussians(const std::vector<SparsePoint>& points,
                          const PointPartition& partition, double scene_extent);

}  // namespace textsplat
