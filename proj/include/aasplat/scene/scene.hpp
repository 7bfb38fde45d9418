#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aasplat/core/camera.hpp"
#include "aasplat/core/factor.hpp"
#include "aasplat/core/gaussian.hpp"
#include "aasplat/image.hpp"

namespace aasplat::scene {

enum class SceneKind { CheckerPlane, ThinGrid, TexturedBox, DepthImagePair };
enum class ScalePolicy { Degenerate, PixelMatched };

inline constexpr double kDegenerateScale = 1e-6;

const char* kind_name(SceneKind kind);
SceneKind parse_kind(const std::string& name);
const char* policy_name(ScalePolicy policy);
ScalePolicy parse_policy(const std::string& name);

struct DepthImagePair {
    Image image;  // RGB
    Image depth;  // one channel, world units along the optical axis
    core::Camera camera;

    void validate() const;
};

struct SceneSpec {
    std::string name = "scene";
    SceneKind kind = SceneKind::CheckerPlane;

    // Geometry. World z is the depth axis of a camera at the origin with identity rotation.
    double plane_depth = 4.0;       // checker plane, grid bars, box center
    double background_depth = 8.0;  // backdrop behind grid bars and box
    double bar_width = 0.0;         // 0: one pixel footprint of context camera 0 at plane_depth
    double bar_period = 0.0;        // 0: eight bar widths
    Eigen::Vector3d box_size{1.5, 1.5, 1.5};
    double box_yaw_deg = 30.0;
    double box_pitch_deg = 20.0;

    // Texture.
    double checker_period = 0.5;
    Eigen::Vector3d color_a{0.9, 0.9, 0.9};
    Eigen::Vector3d color_b{0.1, 0.1, 0.1};
    Eigen::Vector3d background_color{0.5, 0.5, 0.5};

    std::vector<core::Camera> context_cameras;
    double opacity = 1.0;
    ScalePolicy scale_policy = ScalePolicy::PixelMatched;
    double scale_multiplier = 1.0;

    // Optional multiplicative depth noise, uniform in [-j, j], drawn from `seed`.
    double depth_jitter = 0.0;
    std::uint64_t seed = 0;

    // Input for the DepthImagePair kind; one pair per context camera.
    std::vector<DepthImagePair> pairs;

    /// Throws InvalidArgument on an empty camera list, geometry behind a near
    /// plane or otherwise invalid parameters.
    void validate() const;
};

/// One primitive per pixel of the pair.
std::vector<core::Gaussian3D> unproject(const DepthImagePair& pair, const SceneSpec& spec);

/// Reference image plus per-pixel geometric coverage in [0,1].
struct GroundTruthImage {
    Image color;
    Image coverage;
};

class GroundTruth {
public:
    virtual ~GroundTruth() = default;

    /// Whether references exist at any resolution (analytic) or only at and
    /// below the context resolution (image pairs).
    virtual bool analytic() const = 0;

    /// Pixel-area-averaged reference for `camera`. Throws InvalidArgument when
    /// the camera cannot be served.
    virtual GroundTruthImage render(const core::Camera& camera) const = 0;
};

struct SyntheticScene {
    std::vector<core::Gaussian3D> gaussians;
    std::vector<core::Camera> context_cameras;
    std::shared_ptr<const GroundTruth> ground_truth;
};

/// Builds the analytic reference for `spec` without unprojecting anything.
std::shared_ptr<const GroundTruth> make_ground_truth(const SceneSpec& spec);

/// Depth (ray through each pixel center) and reference color for one context camera.
DepthImagePair rasterize_depth_image(const SceneSpec& spec, const core::Camera& camera);

SyntheticScene synthesize(const SceneSpec& spec);

/// 3DGS PLY interchange: log scales, logit opacity, (w,x,y,z) rotation.
std::vector<core::Gaussian3D> load_ply(const std::string& path);
void save_ply(const std::string& path, const std::vector<core::Gaussian3D>& gaussians);

}  // namespace aasplat::scene
