#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "aasplat/core/camera.hpp"
#include "aasplat/core/gaussian.hpp"
#include "aasplat/core/projection.hpp"

namespace aasplat::filters {

/// Filtering regime applied between projection and rasterization.
enum class Regime {
    VanillaDilation,    // screen-space dilation, no attenuation
    Mip2D,              // screen-space Mip filter
    Blpf3DWithDilation, // 3D band-limiting + dilation
    Blpf3DWithMip,      // 3D band-limiting + Mip
    ObblWithDilation,   // 3D band-limiting + dilation + opacity balancing
    ObblFull,           // 3D band-limiting + Mip + opacity balancing
};

/// Short config/file-name token: vanilla, mip, blpf3d_dilation, blpf3d_mip,
/// obbl_dilation, obbl.
std::string_view regime_name(Regime r);
Regime parse_regime(std::string_view name);
std::span<const Regime> all_regimes();

struct FilterConfig {
    Regime regime = Regime::ObblFull;
    double sigma_s = 0.2;
    double s_2d = 0.1;
    double tau_opa = 0.6;
    double tau_alpha = 0.001;
    bool ob_enabled = true;

    /// Defaults for a regime; ob_enabled follows the regime.
    static FilterConfig for_regime(Regime r);

    bool uses_blpf3d() const noexcept;
    bool uses_mip() const noexcept;

    /// Throws InvalidArgument when a hyperparameter is out of range.
    void validate() const;
};

struct SamplingBound {
    double nu_hat = 0.0;      // pixels per world unit
    double filter_std = 0.0;  // sigma_s / nu_hat, world units
    bool visible_in_any_view = false;
};

struct Visibility {
    bool visible = false;
    double depth = 0.0;
};

/// Fraction of the image size by which the visibility window extends past
/// each border.
inline constexpr double kVisibilityMargin = 0.15;

Visibility visibility(const Eigen::Vector3d& center, const core::Camera& cam);

/// Highest f/d over the views that see `center`. When none does, falls back to
/// the max of f/|d| over all views (floored at 1e-6) and clears
/// visible_in_any_view. Throws InvalidArgument on an empty camera list.
SamplingBound maximal_sampling_rate(const Eigen::Vector3d& center,
                                    std::span<const core::Camera> cams, double sigma_s = 0.2);

/// Adds filter_std in quadrature to every scale component.
Eigen::Vector3d blpf3d_apply(const Eigen::Vector3d& scale, const SamplingBound& bound);

/// Band-limits a whole scene against its context views.
std::vector<core::Gaussian3D> blpf3d_scene(std::span<const core::Gaussian3D> scene,
                                           std::span<const core::Camera> context_cams,
                                           double sigma_s);

core::ProjectedGaussian dilate_vanilla(core::ProjectedGaussian pg, double s_2d);

/// Determinant floor used before the Mip attenuation ratio.
inline constexpr double kMipDetFloor = 1e-12;

core::ProjectedGaussian mip_2d(core::ProjectedGaussian pg, double s_2d);

double clamp_opacity(double opacity, double tau_opa);

}  // namespace aasplat::filters
