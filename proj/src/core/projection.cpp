#include "aasplat/core/projection.hpp"

namespace aasplat::core {

CameraSpaceGaussian world_to_camera(const Eigen::Vector3d& center, const Covariance3& cov,
                                    const Camera& cam) {
    const Eigen::Matrix3d& r = cam.rotation;
    Eigen::Matrix3d c = r * cov.matrix() * r.transpose();
    return {cam.to_camera(center), Covariance3(0.5 * (c + c.transpose()))};
}

CameraSpaceGaussian world_to_camera(const Gaussian3D& g, const Camera& cam) {
    return world_to_camera(g.center, build_covariance(g.scale, g.rotation), cam);
}

std::optional<ProjectedGaussian> project(const Eigen::Vector3d& mean_cam, const Covariance3& cov_cam,
                                         const Camera& cam) {
    const double z = mean_cam.z();
    if (!(z > cam.near_plane)) {
        return std::nullopt;
    }
    const double x = mean_cam.x();
    const double y = mean_cam.y();
    const double f = cam.focal;

    // Only the first two rows of the Jacobian survive the truncation to 2x2.
    Eigen::Matrix<double, 2, 3> jac;
    jac << f / z, 0.0, -f * x / (z * z),
           0.0, f / z, -f * y / (z * z);

    ProjectedGaussian pg;
    pg.mean2d = cam.project_point(mean_cam);
    const Eigen::Matrix2d cov = jac * cov_cam.matrix() * jac.transpose();
    pg.cov2d = 0.5 * (cov + cov.transpose());
    pg.depth = z;
    return pg;
}

std::optional<ProjectedGaussian> project(const Gaussian3D& g, const Camera& cam) {
    const auto cs = world_to_camera(g, cam);
    auto pg = project(cs.mean, cs.cov, cam);
    if (!pg) {
        return std::nullopt;
    }
    pg->opacity = g.opacity;
    const Eigen::Vector3d dir = g.center - cam.position();
    const double n = dir.norm();
    pg->color = evaluate_color(g, n > 0.0 ? Eigen::Vector3d(dir / n) : Eigen::Vector3d::UnitZ());
    return pg;
}

}  // namespace aasplat::core
