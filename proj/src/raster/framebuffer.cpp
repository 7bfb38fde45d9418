#include "aasplat/raster/framebuffer.hpp"

#include <limits>

namespace aasplat::raster {

Framebuffer Framebuffer::make(int width, int height) {
    Framebuffer fb;
    fb.color = Image(width, height, 3);
    fb.alpha = Image(width, height, 1);
    fb.depth_hint = Image(width, height, 1, std::numeric_limits<float>::infinity());
    fb.coverage = Image(width, height, 1);
    return fb;
}

Image Framebuffer::rgba() const {
    Image out(width(), height(), 4);
    for (int y = 0; y < height(); ++y) {
        for (int x = 0; x < width(); ++x) {
            for (int c = 0; c < 3; ++c) {
                out.at(x, y, c) = color.at(x, y, c);
            }
            out.at(x, y, 3) = alpha.at(x, y);
        }
    }
    return out;
}

}  // namespace aasplat::raster
