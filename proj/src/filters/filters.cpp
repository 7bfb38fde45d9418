#include "aasplat/filters/filters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "aasplat/error.hpp"

namespace aasplat::filters {

namespace {

constexpr std::array kRegimes = {Regime::VanillaDilation,    Regime::Mip2D,
                                 Regime::Blpf3DWithDilation, Regime::Blpf3DWithMip,
                                 Regime::ObblWithDilation,   Regime::ObblFull};

}  // namespace

std::string_view regime_name(Regime r) {
    switch (r) {
        case Regime::VanillaDilation: return "vanilla";
        case Regime::Mip2D: return "mip";
        case Regime::Blpf3DWithDilation: return "blpf3d_dilation";
        case Regime::Blpf3DWithMip: return "blpf3d_mip";
        case Regime::ObblWithDilation: return "obbl_dilation";
        case Regime::ObblFull: return "obbl";
    }
    return "unknown";
}

Regime parse_regime(std::string_view name) {
    for (Regime r : kRegimes) {
        if (regime_name(r) == name) {
            return r;
        }
    }
    throw InvalidArgument("unknown regime '" + std::string(name) +
                          "' (expected vanilla, mip, blpf3d_dilation, blpf3d_mip, obbl_dilation or obbl)");
}

std::span<const Regime> all_regimes() { return kRegimes; }

FilterConfig FilterConfig::for_regime(Regime r) {
    FilterConfig c;
    c.regime = r;
    c.ob_enabled = (r == Regime::ObblWithDilation || r == Regime::ObblFull);
    return c;
}

bool FilterConfig::uses_blpf3d() const noexcept {
    return regime != Regime::VanillaDilation && regime != Regime::Mip2D;
}

bool FilterConfig::uses_mip() const noexcept {
    return regime == Regime::Mip2D || regime == Regime::Blpf3DWithMip || regime == Regime::ObblFull;
}

void FilterConfig::validate() const {
    if (!(sigma_s > 0.0)) throw InvalidArgument("sigma_s must be > 0");
    if (!(s_2d > 0.0)) throw InvalidArgument("s_2d must be > 0");
    if (!(tau_opa > 0.0 && tau_opa <= 1.0)) throw InvalidArgument("tau_opa must be in (0,1]");
    if (!(tau_alpha > 0.0 && tau_alpha < 1.0)) throw InvalidArgument("tau_alpha must be in (0,1)");
}

Visibility visibility(const Eigen::Vector3d& center, const core::Camera& cam) {
    const Eigen::Vector3d p = cam.to_camera(center);
    Visibility v{false, p.z()};
    if (!(p.z() > cam.near_plane)) {
        return v;
    }
    const Eigen::Vector2d uv = cam.project_point(p);
    const double mx = kVisibilityMargin * cam.width;
    const double my = kVisibilityMargin * cam.height;
    v.visible = uv.x() >= -mx && uv.x() <= cam.width + mx && uv.y() >= -my && uv.y() <= cam.height + my;
    return v;
}

SamplingBound maximal_sampling_rate(const Eigen::Vector3d& center,
                                    std::span<const core::Camera> cams, double sigma_s) {
    if (cams.empty()) {
        throw InvalidArgument("maximal_sampling_rate needs at least one camera");
    }
    SamplingBound b;
    double fallback = 0.0;
    for (const auto& cam : cams) {
        const Visibility v = visibility(center, cam);
        if (v.visible) {
            b.nu_hat = std::max(b.nu_hat, cam.focal / v.depth);
            b.visible_in_any_view = true;
        }
        if (v.depth != 0.0) {
            fallback = std::max(fallback, cam.focal / std::abs(v.depth));
        }
    }
    if (!b.visible_in_any_view) {
        b.nu_hat = std::max(fallback, 1e-6);
    }
    b.filter_std = sigma_s / b.nu_hat;
    return b;
}

Eigen::Vector3d blpf3d_apply(const Eigen::Vector3d& scale, const SamplingBound& bound) {
    const double v = bound.filter_std * bound.filter_std;
    return (scale.array().square() + v).sqrt().matrix();
}

std::vector<core::Gaussian3D> blpf3d_scene(std::span<const core::Gaussian3D> scene,
                                           std::span<const core::Camera> context_cams,
                                           double sigma_s) {
    std::vector<core::Gaussian3D> out(scene.begin(), scene.end());
    for (auto& g : out) {
        g.scale = blpf3d_apply(g.scale, maximal_sampling_rate(g.center, context_cams, sigma_s));
    }
    return out;
}

core::ProjectedGaussian dilate_vanilla(core::ProjectedGaussian pg, double s_2d) {
    pg.cov2d.diagonal().array() += s_2d;
    return pg;
}

core::ProjectedGaussian mip_2d(core::ProjectedGaussian pg, double s_2d) {
    const double det_old = std::max(pg.cov2d.determinant(), kMipDetFloor);
    pg.cov2d.diagonal().array() += s_2d;
    const double det_new = std::max(pg.cov2d.determinant(), kMipDetFloor);
    pg.opacity *= std::sqrt(det_old / det_new);
    return pg;
}

double clamp_opacity(double opacity, double tau_opa) { return std::min(opacity, tau_opa); }

}  // namespace aasplat::filters
