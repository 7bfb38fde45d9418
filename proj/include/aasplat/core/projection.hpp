#pragma once

#include <optional>

#include <Eigen/Core>

#include "aasplat/core/camera.hpp"
#include "aasplat/core/gaussian.hpp"

namespace aasplat::core {

/// A screen-space splat.
struct ProjectedGaussian {
    Eigen::Vector2d mean2d = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov2d = Eigen::Matrix2d::Zero();
    double depth = 0.0;
    double opacity = 0.0;  // effective opacity after any attenuation/clamping
    Eigen::Vector3d color = Eigen::Vector3d::Zero();
};

struct CameraSpaceGaussian {
    Eigen::Vector3d mean;
    Covariance3 cov;
};

CameraSpaceGaussian world_to_camera(const Eigen::Vector3d& center, const Covariance3& cov,
                                    const Camera& cam);
CameraSpaceGaussian world_to_camera(const Gaussian3D& g, const Camera& cam);

/// Local affine (EWA) projection with the pinhole Jacobian evaluated at the
/// mean. Returns nullopt when the mean is not in front of the near plane.
/// Opacity and color of the result are left at zero.
std::optional<ProjectedGaussian> project(const Eigen::Vector3d& mean_cam, const Covariance3& cov_cam,
                                         const Camera& cam);

/// Full per-primitive projection: transform, project, shade, copy opacity.
std::optional<ProjectedGaussian> project(const Gaussian3D& g, const Camera& cam);

}  // namespace aasplat::core
