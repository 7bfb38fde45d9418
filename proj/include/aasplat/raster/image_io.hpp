#pragma once

#include <filesystem>

#include "aasplat/image.hpp"

namespace aasplat::raster {

/// 8-bit PNG with an sRGB chunk; values are clamped to [0,1] and written as
/// display-referred. Supports 1, 3 and 4 channel images.
void write_png(const std::filesystem::path& path, const Image& image);

/// Raw float dump: 16-byte header ("AASP", u32 width, u32 height,
/// u32 channels, little-endian) followed by channel-planar float32 data.
void write_float_image(const std::filesystem::path& path, const Image& image);
Image read_float_image(const std::filesystem::path& path);

/// Writes through a temporary sibling file and renames it into place.
template <typename Writer>
void write_atomically(const std::filesystem::path& path, Writer&& writer) {
    auto tmp = path;
    tmp += ".tmp";
    writer(tmp);
    std::filesystem::rename(tmp, path);
}

}  // namespace aasplat::raster
