#include "aasplat/raster/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "aasplat/error.hpp"
#include "aasplat/parallel.hpp"

namespace aasplat::raster {

namespace {

struct Conic {
    double a, b, c;  // inverse covariance entries (xx, xy, yy)
};

bool conic_of(const Eigen::Matrix2d& cov, Conic& out) {
    const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(0, 1);
    if (!(det >= kDegenerateDet)) {
        return false;
    }
    const double inv = 1.0 / det;
    out = {cov(1, 1) * inv, -cov(0, 1) * inv, cov(0, 0) * inv};
    return true;
}

// Tile-local copy of what the inner loop reads.
struct SplatView {
    double mx, my;
    Conic conic;
    double opacity;
    double r, g, b;
    double depth;
};

auto sort_key(const core::ProjectedGaussian& s) {
    return std::make_tuple(s.depth, s.mean2d.x(), s.mean2d.y(), s.opacity, s.color.x(), s.color.y(),
                           s.color.z(), s.cov2d(0, 0), s.cov2d(0, 1), s.cov2d(1, 1));
}

}  // namespace

void RenderSettings::validate() const {
    if (width < 0 || height < 0) throw InvalidArgument("render size must be non-negative");
    if (tile_size <= 0) throw InvalidArgument("tile_size must be positive");
    if (!(cull_sigma > 0.0)) throw InvalidArgument("cull_sigma must be positive");
    if (!(alpha_skip > 0.0 && alpha_skip < 1.0)) throw InvalidArgument("alpha_skip must be in (0,1)");
    if (!(transmittance_stop > 0.0 && transmittance_stop < 1.0)) {
        throw InvalidArgument("transmittance_stop must be in (0,1)");
    }
    if (!background.allFinite()) throw InvalidArgument("background must be finite");
}

TileRect TileBins::rect(std::size_t tile) const {
    const int tx = static_cast<int>(tile % static_cast<std::size_t>(tiles_x));
    const int ty = static_cast<int>(tile / static_cast<std::size_t>(tiles_x));
    return {tx * tile_size, ty * tile_size, std::min(width, (tx + 1) * tile_size),
            std::min(height, (ty + 1) * tile_size)};
}

std::vector<std::uint32_t> depth_order(std::span<const core::ProjectedGaussian> splats) {
    std::vector<std::uint32_t> order(splats.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t l, std::uint32_t r) {
        return sort_key(splats[l]) < sort_key(splats[r]);
    });
    return order;
}

TileBins cull_and_bin(std::span<const core::ProjectedGaussian> splats, const RenderSettings& settings,
                      int width, int height, double near_plane,
                      std::span<const std::uint32_t> order, RenderStats* stats) {
    TileBins bins;
    bins.tile_size = settings.tile_size;
    bins.width = width;
    bins.height = height;
    bins.tiles_x = (width + settings.tile_size - 1) / settings.tile_size;
    bins.tiles_y = (height + settings.tile_size - 1) / settings.tile_size;
    bins.lists.resize(static_cast<std::size_t>(bins.tiles_x) * bins.tiles_y);

    RenderStats local;
    local.input = splats.size();
    const std::size_t n = order.empty() ? splats.size() : order.size();
    const double k = settings.cull_sigma;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t idx = order.empty() ? static_cast<std::uint32_t>(i) : order[i];
        const auto& s = splats[idx];
        if (!(s.depth > near_plane)) {
            ++local.culled_near;
            continue;
        }
        if (!(s.opacity >= settings.alpha_skip)) {
            ++local.culled_opacity;
            continue;
        }
        Conic conic;
        if (!conic_of(s.cov2d, conic)) {
            ++local.degenerate_skipped;
            continue;
        }
        // The ellipse d^T S^-1 d <= k^2 has axis-aligned half extents k*sqrt(S_ii).
        const double rx = k * std::sqrt(s.cov2d(0, 0));
        const double ry = k * std::sqrt(s.cov2d(1, 1));
        // Pixel i is reachable when its center i + 0.5 lies in [m - r, m + r].
        const double px0 = std::ceil(s.mean2d.x() - rx - 0.5);
        const double px1 = std::floor(s.mean2d.x() + rx - 0.5);
        const double py0 = std::ceil(s.mean2d.y() - ry - 0.5);
        const double py1 = std::floor(s.mean2d.y() + ry - 0.5);
        if (px1 < 0.0 || py1 < 0.0 || px0 > width - 1 || py0 > height - 1 || px0 > px1 || py0 > py1) {
            continue;
        }
        const int tx0 = static_cast<int>(std::max(px0, 0.0)) / settings.tile_size;
        const int tx1 = static_cast<int>(std::min(px1, width - 1.0)) / settings.tile_size;
        const int ty0 = static_cast<int>(std::max(py0, 0.0)) / settings.tile_size;
        const int ty1 = static_cast<int>(std::min(py1, height - 1.0)) / settings.tile_size;
        for (int ty = ty0; ty <= ty1; ++ty) {
            for (int tx = tx0; tx <= tx1; ++tx) {
                bins.lists[static_cast<std::size_t>(ty) * bins.tiles_x + tx].push_back(idx);
                ++local.tile_refs;
            }
        }
    }
    if (stats) {
        *stats = local;
    }
    return bins;
}

void composite_tile(std::span<const core::ProjectedGaussian> splats,
                    std::span<const std::uint32_t> tile_splats, const TileRect& rect,
                    const RenderSettings& settings, Framebuffer& fb,
                    std::size_t* degenerate_skipped) {
    std::vector<SplatView> views;
    views.reserve(tile_splats.size());
    for (std::uint32_t idx : tile_splats) {
        const auto& s = splats[idx];
        SplatView v;
        if (!conic_of(s.cov2d, v.conic)) {
            if (degenerate_skipped) {
                ++*degenerate_skipped;
            }
            continue;
        }
        v.mx = s.mean2d.x();
        v.my = s.mean2d.y();
        v.opacity = s.opacity;
        v.r = s.color.x();
        v.g = s.color.y();
        v.b = s.color.z();
        v.depth = s.depth;
        views.push_back(v);
    }

    const double support = settings.cull_sigma * settings.cull_sigma;
    for (int y = rect.y0; y < rect.y1; ++y) {
        for (int x = rect.x0; x < rect.x1; ++x) {
            const double px = x + 0.5;
            const double py = y + 0.5;
            double t = 1.0;
            double cr = 0.0, cg = 0.0, cb = 0.0, acc = 0.0;
            double front = std::numeric_limits<double>::infinity();
            for (const SplatView& v : views) {
                const double dx = px - v.mx;
                const double dy = py - v.my;
                const double maha = v.conic.a * dx * dx + 2.0 * v.conic.b * dx * dy + v.conic.c * dy * dy;
                if (maha > support) {
                    continue;
                }
                const double a = std::min(kMaxSplatAlpha, v.opacity * std::exp(-0.5 * maha));
                if (a < settings.alpha_skip) {
                    continue;
                }
                const double w = a * t;
                cr += v.r * w;
                cg += v.g * w;
                cb += v.b * w;
                acc += w;
                if (front == std::numeric_limits<double>::infinity()) {
                    front = v.depth;
                }
                t *= 1.0 - a;
                if (t < settings.transmittance_stop) {
                    break;
                }
            }
            fb.color.at(x, y, 0) = static_cast<float>(cr);
            fb.color.at(x, y, 1) = static_cast<float>(cg);
            fb.color.at(x, y, 2) = static_cast<float>(cb);
            fb.alpha.at(x, y) = static_cast<float>(acc);
            fb.coverage.at(x, y) = static_cast<float>(acc);
            fb.depth_hint.at(x, y) = static_cast<float>(front);
        }
    }
}

void ob_normalize(Framebuffer& fb, double tau_alpha) {
    for (int y = 0; y < fb.height(); ++y) {
        for (int x = 0; x < fb.width(); ++x) {
            const float a = fb.alpha.at(x, y);
            if (a >= tau_alpha) {
                for (int c = 0; c < 3; ++c) {
                    fb.color.at(x, y, c) /= a;
                }
                fb.coverage.at(x, y) = 1.0f;
            }
        }
    }
}

void composite_background(Framebuffer& fb, const Eigen::Vector3d& background) {
    if (background.isZero()) {
        return;
    }
    for (int y = 0; y < fb.height(); ++y) {
        for (int x = 0; x < fb.width(); ++x) {
            const double t = 1.0 - fb.coverage.at(x, y);
            for (int c = 0; c < 3; ++c) {
                fb.color.at(x, y, c) = static_cast<float>(fb.color.at(x, y, c) + background[c] * t);
            }
        }
    }
}

std::vector<core::ProjectedGaussian> prepare_splats(std::span<const core::Gaussian3D> scene,
                                                    const core::Camera& cam,
                                                    std::span<const core::Camera> context_cams,
                                                    const filters::FilterConfig& config) {
    std::vector<core::Gaussian3D> filtered;
    std::span<const core::Gaussian3D> source = scene;
    if (config.uses_blpf3d()) {
        if (context_cams.empty()) {
            throw InvalidArgument("3D band-limiting regimes need at least one context camera");
        }
        filtered = filters::blpf3d_scene(scene, context_cams, config.sigma_s);
        source = filtered;
    }

    std::vector<core::ProjectedGaussian> out;
    out.reserve(source.size());
    for (const auto& g : source) {
        auto pg = core::project(g, cam);
        if (!pg) {
            continue;
        }
        // Opacity balancing clamps the primitive opacity; the Mip attenuation
        // then scales the clamped value.
        if (config.ob_enabled) {
            pg->opacity = filters::clamp_opacity(pg->opacity, config.tau_opa);
        }
        out.push_back(config.uses_mip() ? filters::mip_2d(*pg, config.s_2d)
                                        : filters::dilate_vanilla(*pg, config.s_2d));
    }
    return out;
}

Framebuffer rasterize(std::span<const core::ProjectedGaussian> splats, const core::Camera& cam,
                      const filters::FilterConfig& config, const RenderSettings& settings,
                      RenderStats* stats) {
    settings.validate();
    const int width = settings.width > 0 ? settings.width : cam.width;
    const int height = settings.height > 0 ? settings.height : cam.height;
    if (width != cam.width || height != cam.height) {
        throw DimensionMismatch("render settings size does not match the camera");
    }

    const auto order = depth_order(splats);
    RenderStats local;
    const TileBins bins = cull_and_bin(splats, settings, width, height, cam.near_plane, order, &local);

    Framebuffer fb = Framebuffer::make(width, height);
    parallel_for(bins.lists.size(), settings.threads, [&](std::size_t tile) {
        composite_tile(splats, bins.lists[tile], bins.rect(tile), settings, fb);
    });

    if (config.ob_enabled && !settings.normalize_after_background) {
        ob_normalize(fb, config.tau_alpha);
        composite_background(fb, settings.background);
    } else {
        composite_background(fb, settings.background);
        if (config.ob_enabled) {
            ob_normalize(fb, config.tau_alpha);
        }
    }
    if (stats) {
        *stats = local;
    }
    return fb;
}

Framebuffer render(std::span<const core::Gaussian3D> scene, const core::Camera& cam,
                   std::span<const core::Camera> context_cams, const filters::FilterConfig& config,
                   const RenderSettings& settings, RenderStats* stats) {
    config.validate();
    cam.validate();
    const auto splats = prepare_splats(scene, cam, context_cams, config);
    RenderStats local;
    Framebuffer fb = rasterize(splats, cam, config, settings, &local);
    local.input = scene.size();
    local.culled_near += scene.size() - splats.size();
    if (stats) {
        *stats = local;
    }
    return fb;
}

}  // namespace aasplat::raster
