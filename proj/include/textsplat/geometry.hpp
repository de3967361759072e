#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace textsplat {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

enum class CameraModel { SimplePinhole, Pinhole };

struct CameraIntrinsics {
    int32_t camera_id = 0;
    CameraModel model = CameraModel::Pinhole;
    int width = 0;
    int height = 0;
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
};

// World-to-camera rigid transform: x_cam = R(q) * x_world + t.
struct CameraPose {
    int32_t image_id = 0;
    Vec4 rotation{1, 0, 0, 0};  // (qw, qx, qy, qz), unit
    Vec3 translation{0, 0, 0};
    int32_t camera_id = 0;
    std::string name;

    Mat3 rotation_matrix() const;
    Vec3 camera_center() const;  // -R^T t
};

struct PixelCoord {
    double u = 0;
    double v = 0;
    double depth = 0;
};

Mat3 quat_to_matrix(const Vec4& q);

// Inverse of quat_to_matrix for a proper rotation matrix; returns the unit
// quaternion with non-negative w.
Vec4 matrix_to_quat(const Mat3& m);

Vec3 world_to_camera(const CameraPose& pose, const Vec3& p);

// Pinhole projection. Absent when the point is at or behind the camera
// (z <= 1e-8) or lands outside [0,width) x [0,height).
std::optional<PixelCoord> project(const CameraIntrinsics& intr, const CameraPose& pose,
                                  const Vec3& p);

// Inverse of project for an in-bounds pixel with known depth.
Vec3 unproject(const CameraIntrinsics& intr, const CameraPose& pose, const PixelCoord& pc);

// Radius of the camera-position bounding sphere (center = mean position).
double scene_extent(const std::vector<CameraPose>& poses);

inline constexpr double kZEpsilon = 1e-8;

}  // namespace textsplat
