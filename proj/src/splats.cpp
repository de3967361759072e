#include "textsplat/splats.hpp"

namespace textsplat {

size_t SplatScene::count_region(Region r) const {
    size_t n = 0;
    for (const auto& g : gaussians) n += g.region == r;
    return n;
}

Vec4 normalized_quat(const Vec4& q) {
    double n = q.norm();
    if (n < 1e-12) return Vec4(1, 0, 0, 0);
    return q / n;
}

Mat3 covariance(const Gaussian& g) {
    Mat3 r = quat_to_matrix(normalized_quat(g.rotation));
    Vec3 s = g.scale();
    Mat3 m = r * s.asDiagonal();
    return m * m.transpose();
}

Vec3 sample_position(const Gaussian& g, Rng& rng) {
    // Sigma = (R S)(R S)^T, so mu + R S n with n ~ N(0, I) has the right law.
    Vec3 n(rng.normal(), rng.normal(), rng.normal());
    Mat3 r = quat_to_matrix(normalized_quat(g.rotation));
    return g.position + r * (g.scale().cwiseProduct(n));
}

}  // namespace textsplat
