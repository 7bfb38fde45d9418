#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aasplat/core/camera.hpp"
#include "aasplat/core/factor.hpp"
#include "aasplat/error.hpp"
#include "aasplat/filters/filters.hpp"
#include "aasplat/raster/rasterizer.hpp"
#include "aasplat/scene/scene.hpp"

namespace aasplat::cli {

/// Invalid run configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
public:
    ConfigError(const std::string& message, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// How references above 1x are obtained: analytic renders when the scene
/// has them (auto/analytic) or bicubic-upsampled 1x references (hrrc).
enum class GtProtocol { Auto, Analytic, Hrrc };

struct SceneEntry {
    std::string name;
    std::optional<scene::SceneSpec> spec;     // synthetic or image-pair scene
    std::optional<std::filesystem::path> ply; // external primitives
    std::vector<core::Camera> context_cameras;
    std::vector<core::Camera> target_cameras;
    // Optional 1x references for PLY scenes, one per target camera.
    std::vector<std::filesystem::path> references;
};

struct RunConfig {
    std::vector<SceneEntry> scenes;
    std::vector<core::Factor> factors;
    std::vector<filters::FilterConfig> regimes;
    raster::RenderSettings settings;
    GtProtocol gt_protocol = GtProtocol::Auto;
    std::filesystem::path output = "out";
    int jobs = 1;
    std::uint64_t seed = 0;

    /// Throws ConfigError when a list is empty or names collide.
    void validate() const;
};

/// Parses a YAML run configuration; relative paths resolve against the
/// file's directory. Throws ConfigError with the offending line.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");

}  // namespace aasplat::cli
