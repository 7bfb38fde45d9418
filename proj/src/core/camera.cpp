#include "aasplat/core/camera.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "aasplat/error.hpp"

namespace aasplat::core {

Camera Camera::look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                       const Eigen::Vector3d& up, int width, int height, double focal,
                       double near_plane) {
    const Eigen::Vector3d forward = (target - eye).normalized();
    Eigen::Vector3d right = forward.cross(up);
    if (right.norm() < 1e-12) {
        throw InvalidArgument("look_at: up vector is parallel to the viewing direction");
    }
    right.normalize();
    // y points down in image space.
    const Eigen::Vector3d down = forward.cross(right);

    Camera cam;
    cam.rotation.row(0) = right.transpose();
    cam.rotation.row(1) = down.transpose();
    cam.rotation.row(2) = forward.transpose();
    cam.translation = -cam.rotation * eye;
    cam.focal = focal;
    cam.width = width;
    cam.height = height;
    cam.principal = {0.5 * width, 0.5 * height};
    cam.near_plane = near_plane;
    return cam;
}

Camera Camera::scaled(Factor factor) const {
    const long w = static_cast<long>(width) * factor.num;
    const long h = static_cast<long>(height) * factor.num;
    if (w % factor.den != 0 || h % factor.den != 0) {
        throw InvalidArgument("image size " + std::to_string(width) + "x" + std::to_string(height) +
                              " is not divisible at factor " + factor.label());
    }
    Camera out = *this;
    out.width = static_cast<int>(w / factor.den);
    out.height = static_cast<int>(h / factor.den);
    out.focal = focal * factor.value();
    out.principal = principal * factor.value();
    return out;
}

void Camera::validate() const {
    if (!((rotation * rotation.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-6)) {
        throw InvalidArgument("camera rotation is not orthonormal");
    }
    if (!(focal > 0.0) || !std::isfinite(focal)) {
        throw InvalidArgument("camera focal length must be positive");
    }
    if (!(near_plane > 0.0)) {
        throw InvalidArgument("camera near plane must be positive");
    }
    if (width <= 0 || height <= 0) {
        throw InvalidArgument("camera image size must be positive");
    }
    if (!translation.allFinite() || !principal.allFinite()) {
        throw InvalidArgument("camera translation/principal point not finite");
    }
}

}  // namespace aasplat::core
