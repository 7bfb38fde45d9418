#include "aasplat/raster/image_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include <png.h>

#include "aasplat/error.hpp"

namespace aasplat::raster {

namespace {

constexpr std::array<char, 4> kMagic = {'A', 'A', 'S', 'P'};

void put_u32(std::ostream& os, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(const unsigned char* b) {
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint32_t float_bits_le(float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, sizeof u);
    if constexpr (std::endian::native == std::endian::big) {
        u = ((u & 0xffu) << 24) | ((u & 0xff00u) << 8) | ((u >> 8) & 0xff00u) | (u >> 24);
    }
    return u;
}

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};

}  // namespace

void write_png(const std::filesystem::path& path, const Image& image) {
    const int color_type = [&] {
        switch (image.channels()) {
            case 1: return PNG_COLOR_TYPE_GRAY;
            case 3: return PNG_COLOR_TYPE_RGB;
            case 4: return PNG_COLOR_TYPE_RGBA;
            default: throw InvalidArgument("write_png supports 1, 3 or 4 channels");
        }
    }();
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
    if (!file) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialisation failed");
    }
    std::vector<png_byte> row(static_cast<std::size_t>(image.width()) * image.channels());
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng failed writing " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, image.width(), image.height(), 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_sRGB_gAMA_and_cHRM(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
    png_write_info(png, info);
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            for (int c = 0; c < image.channels(); ++c) {
                const float v = std::clamp(image.at(x, y, c), 0.0f, 1.0f);
                row[static_cast<std::size_t>(x) * image.channels() + c] =
                    static_cast<png_byte>(std::lround(v * 255.0f));
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_float_image(const std::filesystem::path& path, const Image& image) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    os.write(kMagic.data(), kMagic.size());
    put_u32(os, static_cast<std::uint32_t>(image.width()));
    put_u32(os, static_cast<std::uint32_t>(image.height()));
    put_u32(os, static_cast<std::uint32_t>(image.channels()));
    std::vector<std::uint32_t> plane(image.pixel_count());
    for (int c = 0; c < image.channels(); ++c) {
        std::size_t i = 0;
        for (int y = 0; y < image.height(); ++y) {
            for (int x = 0; x < image.width(); ++x) {
                plane[i++] = float_bits_le(image.at(x, y, c));
            }
        }
        os.write(reinterpret_cast<const char*>(plane.data()),
                 static_cast<std::streamsize>(plane.size() * sizeof(std::uint32_t)));
    }
    if (!os) {
        throw IoError("failed writing " + path.string());
    }
}

Image read_float_image(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open " + path.string());
    }
    unsigned char header[16];
    if (!is.read(reinterpret_cast<char*>(header), sizeof header)) {
        throw FormatError(path.string() + ": truncated header", "header");
    }
    if (!std::equal(kMagic.begin(), kMagic.end(), reinterpret_cast<const char*>(header))) {
        throw FormatError(path.string() + ": bad magic", "magic");
    }
    const std::uint32_t w = get_u32(header + 4);
    const std::uint32_t h = get_u32(header + 8);
    const std::uint32_t c = get_u32(header + 12);
    if (w == 0 || h == 0 || c == 0 || w > (1u << 16) || h > (1u << 16) || c > 16) {
        throw FormatError(path.string() + ": implausible image dimensions", "dimensions");
    }
    Image image(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c));
    std::vector<std::uint32_t> plane(image.pixel_count());
    for (std::uint32_t ch = 0; ch < c; ++ch) {
        if (!is.read(reinterpret_cast<char*>(plane.data()),
                     static_cast<std::streamsize>(plane.size() * sizeof(std::uint32_t)))) {
            throw FormatError(path.string() + ": truncated pixel data", "data");
        }
        std::size_t i = 0;
        for (int y = 0; y < image.height(); ++y) {
            for (int x = 0; x < image.width(); ++x) {
                std::uint32_t u = float_bits_le(std::bit_cast<float>(plane[i++]));
                image.at(x, y, static_cast<int>(ch)) = std::bit_cast<float>(u);
            }
        }
    }
    return image;
}

}  // namespace aasplat::raster
