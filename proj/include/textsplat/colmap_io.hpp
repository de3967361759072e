#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "textsplat/geometry.hpp"

namespace textsplat {

// A COLMAP 3D point. track is the visibility set V_i: image ids in which the
// point is observed, deduplicated and sorted.
struct SparsePoint {
    int64_t point_id = 0;
    Vec3 position{0, 0, 0};
    std::array<uint8_t, 3> color{0, 0, 0};
    double error = 0.0;
    std::vector<int32_t> track;
};

struct ColmapModel {
    std::map<int32_t, CameraIntrinsics> intrinsics;
    std::vector<CameraPose> poses;
    std::vector<SparsePoint> points;
};

enum class ColmapFormat { Binary, Text, Auto };

ColmapModel read_colmap_model(const std::string& dir_path,
                              ColmapFormat format = ColmapFormat::Auto);

void write_colmap_model_binary(const ColmapModel& model, const std::string& dir_path);
void write_colmap_model_text(const ColmapModel& model, const std::string& dir_path);

}  // namespace textsplat
