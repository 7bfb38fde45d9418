#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "aasplat/error.hpp"
#include "aasplat/raster/image_io.hpp"
#include "aasplat/scene/scene.hpp"

namespace aasplat::scene {

namespace {

struct Property {
    std::string name;
    std::string type;
    std::size_t offset = 0;
};

std::size_t type_size(const std::string& t, const std::string& path) {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "float" || t == "int32" || t == "uint32" || t == "float32") return 4;
    if (t == "double" || t == "float64") return 8;
    throw FormatError(path + ": unsupported PLY property type '" + t + "'", "type");
}

template <typename T>
T read_le(const unsigned char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        v = std::bit_cast<T>(bytes);
    }
    return v;
}

double decode(const unsigned char* p, const std::string& t) {
    if (t == "char" || t == "int8") return read_le<std::int8_t>(p);
    if (t == "uchar" || t == "uint8") return read_le<std::uint8_t>(p);
    if (t == "short" || t == "int16") return read_le<std::int16_t>(p);
    if (t == "ushort" || t == "uint16") return read_le<std::uint16_t>(p);
    if (t == "int" || t == "int32") return read_le<std::int32_t>(p);
    if (t == "uint" || t == "uint32") return read_le<std::uint32_t>(p);
    if (t == "float" || t == "float32") return read_le<float>(p);
    return read_le<double>(p);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) {
    p = std::clamp(p, 1e-7, 1.0 - 1e-7);
    return std::log(p / (1.0 - p));
}

void put_float(std::string& out, double v) {
    auto bits = std::bit_cast<std::array<char, 4>>(static_cast<float>(v));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
    out.append(bits.data(), bits.size());
}

}  // namespace

std::vector<core::Gaussian3D> load_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line) || line.substr(0, 3) != "ply") {
        throw FormatError(path + ": not a PLY file", "magic");
    }
    bool ascii = false;
    std::size_t count = 0;
    bool in_vertex = false;
    bool seen_vertex = false;
    std::vector<Property> props;
    std::size_t stride = 0;
    while (true) {
        if (!std::getline(in, line)) throw FormatError(path + ": truncated header", "end_header");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "end_header") break;
        if (key == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "ascii") ascii = true;
            else if (fmt != "binary_little_endian") {
                throw FormatError(path + ": unsupported PLY format '" + fmt + "'", "format");
            }
        } else if (key == "element") {
            std::string name;
            std::size_t n = 0;
            ls >> name >> n;
            if (seen_vertex && name != "vertex") {
                // Trailing elements (faces etc.) are ignored; vertices come first.
                in_vertex = false;
                continue;
            }
            in_vertex = name == "vertex";
            if (in_vertex) {
                seen_vertex = true;
                count = n;
            }
        } else if (key == "property" && in_vertex) {
            std::string type;
            std::string name;
            ls >> type >> name;
            if (type == "list") throw FormatError(path + ": list properties on vertices are unsupported", name);
            props.push_back({name, type, stride});
            stride += type_size(type, path);
        }
    }
    if (!seen_vertex) throw FormatError(path + ": no vertex element", "vertex");

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < props.size(); ++i) index[props[i].name] = i;
    auto require = [&](const std::string& name) {
        const auto it = index.find(name);
        if (it == index.end()) throw FormatError(path + ": missing field '" + name + "'", name);
        return it->second;
    };
    const std::size_t ix = require("x"), iy = require("y"), iz = require("z");
    const std::size_t idc[3] = {require("f_dc_0"), require("f_dc_1"), require("f_dc_2")};
    const std::size_t iop = require("opacity");
    const std::size_t isc[3] = {require("scale_0"), require("scale_1"), require("scale_2")};
    const std::size_t irot[4] = {require("rot_0"), require("rot_1"), require("rot_2"), require("rot_3")};
    std::vector<std::size_t> irest;
    while (index.contains("f_rest_" + std::to_string(irest.size()))) {
        irest.push_back(index["f_rest_" + std::to_string(irest.size())]);
    }
    const std::size_t per_channel = irest.size() / 3;

    std::vector<double> values(props.size());
    std::vector<unsigned char> record(stride);
    std::vector<core::Gaussian3D> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        if (ascii) {
            for (double& v : values) {
                if (!(in >> v)) throw FormatError(path + ": truncated vertex data", "vertex");
            }
        } else {
            if (!in.read(reinterpret_cast<char*>(record.data()), static_cast<std::streamsize>(stride))) {
                throw FormatError(path + ": truncated vertex data", "vertex");
            }
            for (std::size_t i = 0; i < props.size(); ++i) values[i] = decode(record.data() + props[i].offset, props[i].type);
        }
        core::Gaussian3D g;
        g.center = {values[ix], values[iy], values[iz]};
        g.scale = {std::exp(values[isc[0]]), std::exp(values[isc[1]]), std::exp(values[isc[2]])};
        Eigen::Quaterniond q(values[irot[0]], values[irot[1]], values[irot[2]], values[irot[3]]);
        if (!(q.norm() > 0.0)) throw FormatError(path + ": zero rotation quaternion", "rot_0");
        g.rotation = q.normalized();
        g.opacity = sigmoid(values[iop]);
        g.color.dc = {values[idc[0]], values[idc[1]], values[idc[2]]};
        if (per_channel >= 3) {
            std::array<Eigen::Vector3d, 3> band;
            for (int k = 0; k < 3; ++k) {
                for (int c = 0; c < 3; ++c) band[k][c] = values[irest[c * per_channel + k]];
            }
            g.color.band1 = band;
        }
        out.push_back(g);
    }
    return out;
}

void save_ply(const std::string& path, const std::vector<core::Gaussian3D>& gaussians) {
    const bool band1 = std::any_of(gaussians.begin(), gaussians.end(),
                                   [](const core::Gaussian3D& g) { return g.color.degree() >= 1; });
    std::ostringstream header;
    header << "ply\nformat binary_little_endian 1.0\nelement vertex " << gaussians.size() << '\n';
    for (const char* n : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"}) {
        header << "property float " << n << '\n';
    }
    if (band1) {
        for (int i = 0; i < 9; ++i) header << "property float f_rest_" << i << '\n';
    }
    for (const char* n : {"opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) {
        header << "property float " << n << '\n';
    }
    header << "end_header\n";

    std::string body = header.str();
    for (const auto& g : gaussians) {
        for (int i = 0; i < 3; ++i) put_float(body, g.center[i]);
        for (int i = 0; i < 3; ++i) put_float(body, 0.0);
        for (int i = 0; i < 3; ++i) put_float(body, g.color.dc[i]);
        if (band1) {
            for (int c = 0; c < 3; ++c) {
                for (int k = 0; k < 3; ++k) put_float(body, g.color.band1 ? (*g.color.band1)[k][c] : 0.0);
            }
        }
        put_float(body, logit(g.opacity));
        for (int i = 0; i < 3; ++i) put_float(body, std::log(g.scale[i]));
        put_float(body, g.rotation.w());
        put_float(body, g.rotation.x());
        put_float(body, g.rotation.y());
        put_float(body, g.rotation.z());
    }
    raster::write_atomically(path, [&](const std::filesystem::path& tmp) {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os.write(body.data(), static_cast<std::streamsize>(body.size()))) {
            throw IoError("cannot write '" + tmp.string() + "'");
        }
    });
}

}  // namespace aasplat::scene
