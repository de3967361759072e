#include "textsplat/geometry.hpp"

#include <cmath>

namespace textsplat {

Mat3 quat_to_matrix(const Vec4& q) {
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

Vec4 matrix_to_quat(const Mat3& m) {
    // Shepperd's method: branch on the largest diagonal quantity for
    // numerical stability.
    Vec4 q;
    double trace = m(0, 0) + m(1, 1) + m(2, 2);
    if (trace > 0) {
        double s = std::sqrt(trace + 1.0) * 2;
        q << 0.25 * s, (m(2, 1) - m(1, 2)) / s, (m(0, 2) - m(2, 0)) / s,
            (m(1, 0) - m(0, 1)) / s;
    } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
        double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2;
        q << (m(2, 1) - m(1, 2)) / s, 0.25 * s, (m(0, 1) + m(1, 0)) / s,
            (m(0, 2) + m(2, 0)) / s;
    } else if (m(1, 1) > m(2, 2)) {
        double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2;
        q << (m(0, 2) - m(2, 0)) / s, (m(0, 1) + m(1, 0)) / s, 0.25 * s,
            (m(1, 2) + m(2, 1)) / s;
    } else {
        double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2;
        q << (m(1, 0) - m(0, 1)) / s, (m(0, 2) + m(2, 0)) / s, (m(1, 2) + m(2, 1)) / s,
            0.25 * s;
    }
    q.normalize();
    if (q[0] < 0) q = -q;
    return q;
}

Mat3 CameraPose::rotation_matrix() const { return quat_to_matrix(rotation); }

Vec3 CameraPose::camera_center() const { return -rotation_matrix().transpose() * translation; }

Vec3 world_to_camera(const CameraPose& pose, const Vec3& p) {
    return pose.rotation_matrix() * p + pose.translation;
}

std::optional<PixelCoord> project(const CameraIntrinsics& intr, const CameraPose& pose,
                                  const Vec3& p) {
    Vec3 c = world_to_camera(pose, p);
    if (c.z() <= kZEpsilon) return std::nullopt;
    PixelCoord pc;
    pc.u = intr.fx * c.x() / c.z() + intr.cx;
    pc.v = intr.fy * c.y() / c.z() + intr.cy;
    pc.depth = c.z();
    if (pc.u < 0 || pc.u >= double(intr.width) || pc.v < 0 || pc.v >= double(intr.height))
        return std::nullopt;
    return pc;
}

Vec3 unproject(const CameraIntrinsics& intr, const CameraPose& pose, const PixelCoord& pc) {
    Vec3 cam((pc.u - intr.cx) / intr.fx * pc.depth, (pc.v - intr.cy) / intr.fy * pc.depth,
             pc.depth);
    return pose.rotation_matrix().transpose() * (cam - pose.translation);
}

double scene_extent(const std::vector<CameraPose>& poses) {
    if (poses.empty()) return 1.0;
    Vec3 center = Vec3::Zero();
    std::vector<Vec3> centers;
    centers.reserve(poses.size());
    for (const auto& p : poses) {
        centers.push_back(p.camera_center());
        center += centers.back();
    }
    center /= double(poses.size());
    double radius = 0.0;
    for (const auto& c : centers) radius = std::max(radius, (c - center).norm());
    return radius > 0.0 ? radius : 1.0;
}

}  // namespace textsplat
