#include "aasplat/image.hpp"

namespace aasplat {

Image luminance(const Image& rgb) {
    if (rgb.channels() == 1) {
        return rgb;
    }
    Image out(rgb.width(), rgb.height(), 1);
    for (int y = 0; y < rgb.height(); ++y) {
        for (int x = 0; x < rgb.width(); ++x) {
            out.at(x, y) = static_cast<float>(0.299 * rgb.at(x, y, 0) + 0.587 * rgb.at(x, y, 1) +
                                              0.114 * rgb.at(x, y, 2));
        }
    }
    return out;
}

}  // namespace aasplat
