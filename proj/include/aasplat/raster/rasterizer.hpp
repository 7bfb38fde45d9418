#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "aasplat/core/camera.hpp"
#include "aasplat/core/gaussian.hpp"
#include "aasplat/core/projection.hpp"
#include "aasplat/filters/filters.hpp"
#include "aasplat/raster/framebuffer.hpp"

namespace aasplat::raster {

struct RenderSettings {
    int width = 0;   // 0: take from the camera
    int height = 0;  // 0: take from the camera
    int tile_size = 16;
    double cull_sigma = 3.0;
    double alpha_skip = 1.0 / 255.0;
    double transmittance_stop = 1e-4;
    Eigen::Vector3d background = Eigen::Vector3d::Zero();
    /// Composite the background before OB normalization instead of after.
    bool normalize_after_background = false;
    int threads = 1;  // 0: default_thread_count()

    void validate() const;
};

/// Per-splat contribution clamp; keeps transmittance strictly positive.
inline constexpr double kMaxSplatAlpha = 0.999;
/// Splats whose 2D covariance determinant falls below this are skipped.
inline constexpr double kDegenerateDet = 1e-12;

struct RenderStats {
    std::size_t input = 0;
    std::size_t culled_near = 0;      // behind or at the near plane
    std::size_t culled_opacity = 0;   // effective opacity below alpha_skip
    std::size_t degenerate_skipped = 0;
    std::size_t tile_refs = 0;        // total (splat, tile) pairs
};

struct TileRect {
    int x0, y0, x1, y1;  // half-open pixel range
};

struct TileBins {
    int tiles_x = 0;
    int tiles_y = 0;
    int tile_size = 16;
    int width = 0;
    int height = 0;
    std::vector<std::vector<std::uint32_t>> lists;  // row-major over tiles

    TileRect rect(std::size_t tile) const;
};

/// Front-to-back order: ascending depth, ties broken on the remaining splat
/// fields so the result does not depend on input order.
std::vector<std::uint32_t> depth_order(std::span<const core::ProjectedGaussian> splats);

/// Assigns each surviving splat to every tile that holds a pixel center inside
/// its cull_sigma ellipse. Splats are visited in `order` (index order when
/// empty), so sorted input yields sorted tile lists.
TileBins cull_and_bin(std::span<const core::ProjectedGaussian> splats, const RenderSettings& settings,
                      int width, int height, double near_plane,
                      std::span<const std::uint32_t> order = {}, RenderStats* stats = nullptr);

/// Front-to-back alpha compositing of one tile into `fb` (C~, alpha and
/// depth hint). `tile_splats` must be sorted by ascending depth.
void composite_tile(std::span<const core::ProjectedGaussian> splats,
                    std::span<const std::uint32_t> tile_splats, const TileRect& rect,
                    const RenderSettings& settings, Framebuffer& fb,
                    std::size_t* degenerate_skipped = nullptr);

/// color <- color/alpha where alpha >= tau_alpha (those pixels get coverage 1);
/// other pixels are left alone. Alpha is preserved.
void ob_normalize(Framebuffer& fb, double tau_alpha);

/// color += background * (1 - coverage).
void composite_background(Framebuffer& fb, const Eigen::Vector3d& background);

/// Filtering front half of the pipeline: optional 3D band-limiting against the
/// context views, projection, 2D filter and opacity clamping.
std::vector<core::ProjectedGaussian> prepare_splats(std::span<const core::Gaussian3D> scene,
                                                    const core::Camera& cam,
                                                    std::span<const core::Camera> context_cams,
                                                    const filters::FilterConfig& config);

/// Rasterizes already prepared splats (bins, composites, normalizes, adds the
/// background).
Framebuffer rasterize(std::span<const core::ProjectedGaussian> splats, const core::Camera& cam,
                      const filters::FilterConfig& config, const RenderSettings& settings,
                      RenderStats* stats = nullptr);

Framebuffer render(std::span<const core::Gaussian3D> scene, const core::Camera& cam,
                   std::span<const core::Camera> context_cams, const filters::FilterConfig& config,
                   const RenderSettings& settings, RenderStats* stats = nullptr);

}  // namespace aasplat::raster
