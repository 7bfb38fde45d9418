#pragma once

#include <Eigen/Core>

#include "aasplat/core/factor.hpp"

namespace aasplat::core {

/// Pinhole camera. Camera space looks down +z with x to the right and y down;
/// pixel (i, j) covers [i, i+1) x [j, j+1) so its center sits at (i+0.5, j+0.5).
struct Camera {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // world -> camera
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    double focal = 1.0;
    Eigen::Vector2d principal = Eigen::Vector2d::Zero();
    int width = 1;
    int height = 1;
    double near_plane = 0.01;

    static Camera look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                          const Eigen::Vector3d& up, int width, int height, double focal,
                          double near_plane = 0.01);

    Eigen::Vector3d position() const { return -rotation.transpose() * translation; }
    Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const {
        return rotation * world + translation;
    }
    Eigen::Vector3d to_world(const Eigen::Vector3d& cam) const {
        return rotation.transpose() * (cam - translation);
    }
    Eigen::Vector2d project_point(const Eigen::Vector3d& cam) const {
        return {focal * cam.x() / cam.z() + principal.x(), focal * cam.y() / cam.z() + principal.y()};
    }

    /// Same pose, image plane resampled by `factor` (size, focal and principal
    /// point all scale). Throws if the scaled size is not integral.
    Camera scaled(Factor factor) const;

    /// Throws InvalidArgument on a non-orthonormal rotation, non-positive
    /// focal/near or empty image.
    void validate() const;
};

}  // namespace aasplat::core
