#include "aasplat/core/gaussian.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "aasplat/error.hpp"

namespace aasplat::core {

ShColor ShColor::from_rgb(const Eigen::Vector3d& rgb) {
    ShColor c;
    c.dc = (rgb.array() - 0.5) / kShC0;
    return c;
}

bool Covariance3::is_symmetric(double rel_tol) const {
    const double scale = std::max(m_.cwiseAbs().maxCoeff(), 1e-300);
    return (m_ - m_.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

bool Covariance3::is_psd() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(m_, Eigen::EigenvaluesOnly);
    const double trace = m_.trace();
    return eig.eigenvalues().minCoeff() >= -1e-9 * std::max(trace, 0.0);
}

Eigen::Quaterniond normalized_rotation(const Eigen::Quaterniond& q) {
    const double n = q.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-4) {
        throw InvalidRotation("quaternion norm " + std::to_string(n) + " is not within 1e-4 of 1");
    }
    return q.normalized();
}

Covariance3 build_covariance(const Eigen::Vector3d& scale, const Eigen::Quaterniond& rotation) {
    const Eigen::Matrix3d r = normalized_rotation(rotation).toRotationMatrix();
    const Eigen::Matrix3d m = r * scale.array().square().matrix().asDiagonal() * r.transpose();
    // Exact symmetry; the product above can differ in the last ulp.
    return Covariance3(0.5 * (m + m.transpose()));
}

Eigen::Vector3d evaluate_color(const Gaussian3D& g, const Eigen::Vector3d& view_dir) {
    Eigen::Vector3d rgb = (kShC0 * g.color.dc).array() + 0.5;
    if (g.color.band1) {
        const auto& b = *g.color.band1;
        rgb += kShC1 * (-view_dir.y() * b[0] + view_dir.z() * b[1] - view_dir.x() * b[2]);
    }
    return rgb.cwiseMax(0.0).cwiseMin(1.0);
}

void validate(const Gaussian3D& g) {
    if (!g.center.allFinite()) {
        throw InvalidArgument("gaussian center is not finite");
    }
    if (!(g.scale.array() > 0.0).all() || !g.scale.allFinite()) {
        throw InvalidArgument("gaussian scale components must be positive");
    }
    if (std::abs(g.rotation.norm() - 1.0) > 1e-6) {
        throw InvalidRotation("gaussian rotation is not a unit quaternion");
    }
    if (!(g.opacity >= 0.0 && g.opacity <= 1.0)) {
        throw InvalidArgument("gaussian opacity outside [0,1]");
    }
}

}  // namespace aasplat::core
