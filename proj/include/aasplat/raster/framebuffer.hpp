#pragma once

#include "aasplat/image.hpp"

namespace aasplat::raster {

/// Render target. `color` holds the accumulated color (C~) until OB
/// normalization and background compositing turn it into the final image.
/// `alpha` always keeps the splat-only accumulated alpha. `coverage` is the
/// effective opacity of the final pixel: alpha, or 1 where OB normalization
/// declared the pixel opaque.
struct Framebuffer {
    Image color;       // 3 channels
    Image alpha;       // 1 channel
    Image depth_hint;  // 1 channel, depth of the front-most contributor (+inf if none)
    Image coverage;    // 1 channel

    static Framebuffer make(int width, int height);

    int width() const noexcept { return color.width(); }
    int height() const noexcept { return color.height(); }

    /// Interleaved RGBA (color + splat-only alpha) for export.
    Image rgba() const;
};

}  // namespace aasplat::raster
