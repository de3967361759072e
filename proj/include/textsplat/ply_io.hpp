#pragma once

#include <array>
#include <string>
#include <vector>

#include "textsplat/splats.hpp"

namespace textsplat {

// Binary little-endian PLY checkpoint. Per-vertex properties (all double
// unless noted): x,y,z, f_dc_0..2, f_rest_0..44 (channel-major SH rest),
// opacity, scale_0..2, rot_0..3 — all pre-activation — plus int id and
// uchar region (0 non-text, 1 text). Scene extent and the id allocator ride
// in header comments so the round trip reproduces the scene bit-exactly.
void write_ply_gaussians(const SplatScene& scene, const std::string& path);

// Inverse of write_ply_gaussians. A file without the region property loads
// as all non-text with a warning on stderr.
SplatScene read_ply_gaussians(const std::string& path);

// Plain binary point cloud (x,y,z double + uchar r,g,b), for inspection
// exports such as the text/non-text partition.
void write_ply_points(const std::string& path, const std::vector<Vec3>& positions,
                      const std::vector<std::array<uint8_t, 3>>& colors);

}  // namespace textsplat
