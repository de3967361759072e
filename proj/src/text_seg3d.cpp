#include "textsplat/text_seg3d.hpp"

#include <algorithm>
#include <cmath>

#include "textsplat/common.hpp"
#include "textsplat/geometry.hpp"
#include "textsplat/threading.hpp"

namespace textsplat {

MaskGrid dilate_mask(const MaskGrid& mask, double diameter_frac) {
    if (diameter_frac < 0.0 || diameter_frac > 1.0)
        throw InvalidArgument(cat("dilation fraction ", diameter_frac, " outside [0,1]"));
    int diameter = int(std::lround(diameter_frac * mask.width));
    if (diameter <= 1) return mask;

    // Disk membership: offsets within radius of the kernel center. For even
    // diameters the center sits between pixels, handled by the 0.5 shift.
    double radius = diameter / 2.0;
    double center = (diameter - 1) / 2.0;
    std::vector<std::pair<int, int>> offsets;
    for (int dy = 0; dy < diameter; ++dy)
        for (int dx = 0; dx < diameter; ++dx) {
            double ry = dy - center, rx = dx - center;
            if (ry * ry + rx * rx <= radius * radius)
                offsets.emplace_back(dy - int(std::floor(center)), dx - int(std::floor(center)));
        }

    MaskGrid out(mask.height, mask.width, 0);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(y, x)) continue;
            for (auto [dy, dx] : offsets) {
                int ny = y + dy, nx = x + dx;
                if (ny >= 0 && ny < mask.height && nx >= 0 && nx < mask.width)
                    out.at(ny, nx) = 1;
            }
        }
    return out;
}

PointPartition classify_points(const std::vector<SparsePoint>& points,
                               const std::map<int32_t, CameraIntrinsics>& intrinsics,
                               const std::vector<CameraPose>& poses,
                               const std::map<int32_t, MaskGrid>& masks, int tau) {
    if (tau < 1) throw InvalidArgument(cat("tau must be >= 1, got ", tau));
    std::map<int32_t, const CameraPose*> pose_by_id;
    for (const auto& pose : poses) pose_by_id[pose.image_id] = &pose;

    std::vector<uint8_t> is_text(points.size(), 0);
    std::vector<std::string> errors(points.size());
    int n_chunks = std::max(1, std::min<int>(64, int(points.size())));
    parallel_chunks(n_chunks, [&](int chunk) {
        size_t lo = points.size() * size_t(chunk) / size_t(n_chunks);
        size_t hi = points.size() * size_t(chunk + 1) / size_t(n_chunks);
        for (size_t i = lo; i < hi; ++i) {
            const SparsePoint& p = points[i];
            int count = 0;
            for (int32_t image_id : p.track) {
                auto pose_it = pose_by_id.find(image_id);
                if (pose_it == pose_by_id.end()) continue;  // model validation rejects these
                auto mask_it = masks.find(image_id);
                if (mask_it == masks.end()) {
                    errors[i] = cat("no mask for image_id ", image_id, " referenced by point ",
                                    p.point_id);
                    break;
                }
                const CameraPose& pose = *pose_it->second;
                auto pc = project(intrinsics.at(pose.camera_id), pose, p.position);
                if (!pc) continue;
                const MaskGrid& mask = mask_it->second;
                if (mask.at(int(std::floor(pc->v)), int(std::floor(pc->u)))) ++count;
            }
            is_text[i] = count >= tau;
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw InvalidArgument(e);

    PointPartition partition;
    for (size_t i = 0; i < points.size(); ++i) {
        if (is_text[i])
            partition.text_ids.insert(points[i].point_id);
        else
            partition.nontext_ids.insert(points[i].point_id);
    }
    return partition;
}

SplatScene init_gaussians(const std::vector<SparsePoint>& points,
                          const PointPartition& partition, double scene_extent) {
    SplatScene scene;
    scene.scene_extent = scene_extent;
    size_t n = points.size();
    scene.gaussians.resize(n);

    // Mean distance to the 3 nearest neighbors, brute force. Quadratic but
    // comfortably fast at sparse-model sizes; runs once at startup.
    std::vector<double> nn_dist(n, 0.0);
    int n_chunks = std::max(1, std::min<int>(64, int(n)));
    parallel_chunks(n_chunks, [&](int chunk) {
        size_t lo = n * size_t(chunk) / size_t(n_chunks);
        size_t hi = n * size_t(chunk + 1) / size_t(n_chunks);
        for (size_t i = lo; i < hi; ++i) {
            double best[3] = {1e300, 1e300, 1e300};
            for (size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                double d2 = (points[j].position - points[i].position).squaredNorm();
                if (d2 < best[2]) {
                    best[2] = d2;
                    if (best[2] < best[1]) std::swap(best[1], best[2]);
                    if (best[1] < best[0]) std::swap(best[0], best[1]);
                }
            }
            int k = int(std::min<size_t>(3, n - 1));
            double sum = 0;
            for (int m = 0; m < k; ++m) sum += std::sqrt(best[m]);
            nn_dist[i] = k > 0 ? sum / k : 0.01 * scene_extent;
        }
    });

    for (size_t i = 0; i < n; ++i) {
        Gaussian& g = scene.gaussians[i];
        const SparsePoint& p = points[i];
        g.position = p.position;
        double dist = std::clamp(nn_dist[i], 1e-7, scene_extent);
        g.log_scale = Vec3::Constant(std::log(dist));
        g.rotation = Vec4(1, 0, 0, 0);
        g.opacity_logit = logit(0.1);
        for (int ch = 0; ch < 3; ++ch)
            g.sh[size_t(ch * kShCoeffsPerChannel)] =
                (p.color[size_t(ch)] / 255.0 - 0.5) / kSh0;
        g.region = partition.is_text(p.point_id) ? Region::Text : Region::NonText;
        g.id = p.point_id;
        scene.next_id = std::max(scene.next_id, g.id + 1);
    }
    return scene;
}

}  // namespace textsplat
