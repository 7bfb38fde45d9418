#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace aasplat::core {

inline constexpr double kShC0 = 0.28209479177387814;
inline constexpr double kShC1 = 0.4886025119029199;

/// Spherical-harmonics color, degree 0 with an optional degree-1 band.
/// Coefficients follow the usual 3DGS layout: rgb = 0.5 + C0*dc + C1*(-y*b0 + z*b1 - x*b2).
struct ShColor {
    Eigen::Vector3d dc = Eigen::Vector3d::Zero();
    std::optional<std::array<Eigen::Vector3d, 3>> band1;

    static ShColor from_rgb(const Eigen::Vector3d& rgb);
    int degree() const noexcept { return band1 ? 1 : 0; }
};

struct Gaussian3D {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    Eigen::Vector3d scale = Eigen::Vector3d::Ones();
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
    double opacity = 1.0;
    ShColor color;
};

/// Symmetric positive-semidefinite 3x3 covariance in world units squared.
class Covariance3 {
public:
    Covariance3() = default;
    explicit Covariance3(const Eigen::Matrix3d& m) : m_(m) {}

    const Eigen::Matrix3d& matrix() const noexcept { return m_; }

    bool is_symmetric(double rel_tol = 1e-9) const;
    bool is_psd() const;

private:
    Eigen::Matrix3d m_ = Eigen::Matrix3d::Zero();
};

/// Quaternions within 1e-4 of unit norm are renormalized; anything worse
/// throws InvalidRotation.
Eigen::Quaterniond normalized_rotation(const Eigen::Quaterniond& q);

/// R diag(s)^2 R^T.
Covariance3 build_covariance(const Eigen::Vector3d& scale, const Eigen::Quaterniond& rotation);

/// Evaluates the view-dependent color for a unit view direction (camera to
/// primitive). The result is clamped to [0,1].
Eigen::Vector3d evaluate_color(const Gaussian3D& g, const Eigen::Vector3d& view_dir);

/// Throws InvalidArgument if the primitive violates its invariants.
void validate(const Gaussian3D& g);

}  // namespace aasplat::core
