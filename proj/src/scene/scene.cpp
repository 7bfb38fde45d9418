#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Geometry>

#include "aasplat/error.hpp"
#include "aasplat/scene/scene.hpp"
#include "scene_internal.hpp"

namespace aasplat::scene {

using Eigen::Vector3d;

const char* kind_name(SceneKind kind) {
    switch (kind) {
    case SceneKind::CheckerPlane: return "checker_plane";
    case SceneKind::ThinGrid: return "thin_grid";
    case SceneKind::TexturedBox: return "textured_box";
    case SceneKind::DepthImagePair: return "depth_image_pair";
    }
    return "?";
}

SceneKind parse_kind(const std::string& name) {
    for (auto k : {SceneKind::CheckerPlane, SceneKind::ThinGrid, SceneKind::TexturedBox, SceneKind::DepthImagePair}) {
        if (name == kind_name(k)) return k;
    }
    throw InvalidArgument("unknown scene kind '" + name + "'");
}

const char* policy_name(ScalePolicy policy) {
    return policy == ScalePolicy::Degenerate ? "degenerate" : "pixel_matched";
}

ScalePolicy parse_policy(const std::string& name) {
    if (name == "degenerate") return ScalePolicy::Degenerate;
    if (name == "pixel_matched") return ScalePolicy::PixelMatched;
    throw InvalidArgument("unknown scale policy '" + name + "'");
}

void DepthImagePair::validate() const {
    camera.validate();
    if (image.width() != camera.width || image.height() != camera.height || image.channels() != 3) {
        throw DimensionMismatch("depth image pair: image must be RGB of the camera size");
    }
    if (depth.width() != camera.width || depth.height() != camera.height || depth.channels() != 1) {
        throw DimensionMismatch("depth image pair: depth must be single-channel of the camera size");
    }
    for (float d : depth.data()) {
        if (!(d > 0.0f) || !std::isfinite(d)) throw InvalidArgument("depth image pair: depth must be positive");
    }
}

namespace {

Eigen::Matrix3d box_rotation(const SceneSpec& spec) {
    constexpr double deg = std::numbers::pi / 180.0;
    return (Eigen::AngleAxisd(spec.box_yaw_deg * deg, Vector3d::UnitY()) *
            Eigen::AngleAxisd(spec.box_pitch_deg * deg, Vector3d::UnitX()))
        .toRotationMatrix();
}

std::vector<Vector3d> box_corners(const SceneSpec& spec) {
    const Eigen::Matrix3d r = box_rotation(spec);
    const Vector3d c(0, 0, spec.plane_depth);
    std::vector<Vector3d> out;
    for (int i = 0; i < 8; ++i) {
        const Vector3d s((i & 1) ? 0.5 : -0.5, (i & 2) ? 0.5 : -0.5, (i & 4) ? 0.5 : -0.5);
        out.push_back(c + r * s.cwiseProduct(spec.box_size));
    }
    return out;
}

Layer plane_at(double z) {
    Layer l;
    l.origin = Vector3d(0, 0, z);
    return l;
}

double effective_bar_width(const SceneSpec& spec) {
    if (spec.bar_width > 0.0) return spec.bar_width;
    const core::Camera& c = spec.context_cameras.front();
    return c.to_camera(Vector3d(0, 0, spec.plane_depth)).z() / c.focal;
}

double effective_bar_period(const SceneSpec& spec) {
    return spec.bar_period > 0.0 ? spec.bar_period : 8.0 * effective_bar_width(spec);
}

}  // namespace

void SceneSpec::validate() const {
    if (kind == SceneKind::DepthImagePair) {
        if (pairs.empty()) throw InvalidArgument("scene: depth_image_pair needs at least one pair");
        for (const auto& p : pairs) p.validate();
    } else if (context_cameras.empty()) {
        throw InvalidArgument("scene: at least one context camera is required");
    }
    for (const auto& c : context_cameras) c.validate();
    if (!(opacity > 0.0 && opacity <= 1.0)) throw InvalidArgument("scene: opacity must lie in (0, 1]");
    if (!(scale_multiplier > 0.0)) throw InvalidArgument("scene: scale multiplier must be positive");
    if (!(depth_jitter >= 0.0 && depth_jitter < 1.0)) throw InvalidArgument("scene: depth jitter must lie in [0, 1)");
    if (kind == SceneKind::DepthImagePair) return;

    if (!(plane_depth > 0.0)) throw InvalidArgument("scene: plane depth must be positive");
    if (!(checker_period > 0.0)) throw InvalidArgument("scene: checker period must be positive");
    std::vector<Vector3d> probes{Vector3d(0, 0, plane_depth)};
    if (kind == SceneKind::TexturedBox) {
        if (!(box_size.minCoeff() > 0.0)) throw InvalidArgument("scene: box dimensions must be positive");
        probes = box_corners(*this);
        for (const auto& p : probes) {
            if (p.z() >= background_depth) throw InvalidArgument("scene: box must lie in front of the backdrop");
        }
    }
    if (kind == SceneKind::ThinGrid) {
        if (bar_width < 0.0 || bar_period < 0.0) throw InvalidArgument("scene: grid bar sizes must be non-negative");
        if (!(background_depth > plane_depth)) throw InvalidArgument("scene: backdrop must lie behind the grid");
        if (effective_bar_width(*this) >= effective_bar_period(*this)) {
            throw InvalidArgument("scene: grid bar width must be smaller than the bar period");
        }
    }
    for (const auto& cam : context_cameras) {
        if (cam.rotation.row(2).z() <= 0.0) throw InvalidArgument("scene: context camera faces away from the scene");
        for (const auto& p : probes) {
            if (cam.to_camera(p).z() <= cam.near_plane) {
                throw InvalidArgument("scene: geometry behind a context camera near plane");
            }
        }
    }
}

std::shared_ptr<const AnalyticGroundTruth> make_analytic(const SceneSpec& spec) {
    std::vector<Layer> layers;
    std::optional<Layer> backdrop_plane;
    std::optional<Vector3d> backdrop;
    switch (spec.kind) {
    case SceneKind::CheckerPlane: {
        Layer l = plane_at(spec.plane_depth);
        l.pattern = Layer::Pattern::Checker;
        l.period = spec.checker_period;
        l.color_a = spec.color_a;
        l.color_b = spec.color_b;
        layers.push_back(l);
        break;
    }
    case SceneKind::ThinGrid: {
        Layer l = plane_at(spec.plane_depth);
        l.pattern = Layer::Pattern::Bars;
        l.width = effective_bar_width(spec);
        l.period = effective_bar_period(spec);
        l.color_a = spec.color_a;
        layers.push_back(l);
        backdrop_plane = plane_at(spec.background_depth);
        backdrop = spec.background_color;
        break;
    }
    case SceneKind::TexturedBox: {
        const Eigen::Matrix3d r = box_rotation(spec);
        const Vector3d center(0, 0, spec.plane_depth);
        const Vector3d half = 0.5 * spec.box_size;
        for (int a = 0; a < 3; ++a) {
            const int b = (a + 1) % 3;
            const int c = (a + 2) % 3;
            for (double s : {1.0, -1.0}) {
                Layer l;
                l.origin = center + s * half[a] * r.col(a);
                const int iu = s > 0 ? b : c;
                const int iv = s > 0 ? c : b;
                l.axis_u = r.col(iu);
                l.axis_v = r.col(iv);
                l.bounded = true;
                l.bu0 = -half[iu];
                l.bu1 = half[iu];
                l.bv0 = -half[iv];
                l.bv1 = half[iv];
                l.one_sided = true;
                l.pattern = Layer::Pattern::Checker;
                l.period = spec.checker_period;
                l.color_a = spec.color_a;
                l.color_b = spec.color_b;
                layers.push_back(l);
            }
        }
        backdrop_plane = plane_at(spec.background_depth);
        backdrop = spec.background_color;
        break;
    }
    case SceneKind::DepthImagePair:
        throw InvalidArgument("scene: depth_image_pair has no analytic description");
    }
    return std::make_shared<AnalyticGroundTruth>(std::move(layers), std::move(backdrop_plane), std::move(backdrop));
}

std::shared_ptr<const GroundTruth> make_ground_truth(const SceneSpec& spec) {
    spec.validate();
    if (spec.kind == SceneKind::DepthImagePair) return std::make_shared<PairGroundTruth>(spec.pairs);
    return make_analytic(spec);
}

namespace {

DepthImagePair depth_image(const AnalyticGroundTruth& gt, const core::Camera& cam) {
    DepthImagePair pair{gt.render(cam).color, Image(cam.width, cam.height, 1), cam};
    const Vector3d eye = cam.position();
    const Eigen::Matrix3d rt = cam.rotation.transpose();
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            const Vector3d dir_cam((x + 0.5 - cam.principal.x()) / cam.focal,
                                   (y + 0.5 - cam.principal.y()) / cam.focal, 1.0);
            const auto hit = gt.trace(eye, rt * dir_cam);
            if (!hit) {
                throw InvalidArgument("scene: pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                                      ") of a context camera sees no geometry");
            }
            // dir_cam has unit z, so the ray parameter is the depth.
            pair.depth.at(x, y) = static_cast<float>(hit->t);
        }
    }
    return pair;
}

}  // namespace

DepthImagePair rasterize_depth_image(const SceneSpec& spec, const core::Camera& camera) {
    spec.validate();
    if (spec.kind == SceneKind::DepthImagePair) {
        for (const auto& p : spec.pairs) {
            if (p.camera.rotation == camera.rotation && p.camera.translation == camera.translation &&
                p.camera.width == camera.width && p.camera.focal == camera.focal) {
                return p;
            }
        }
        throw InvalidArgument("scene: no depth image pair for the requested camera");
    }
    return depth_image(*make_analytic(spec), camera);
}

std::vector<core::Gaussian3D> unproject(const DepthImagePair& pair, const SceneSpec& spec) {
    pair.validate();
    const core::Camera& cam = pair.camera;
    std::vector<core::Gaussian3D> out;
    out.reserve(static_cast<std::size_t>(cam.width) * cam.height);
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            const double z = pair.depth.at(x, y);
            const Vector3d p_cam((x + 0.5 - cam.principal.x()) / cam.focal * z,
                                 (y + 0.5 - cam.principal.y()) / cam.focal * z, z);
            core::Gaussian3D g;
            g.center = cam.to_world(p_cam);
            const double s = spec.scale_policy == ScalePolicy::Degenerate
                                 ? kDegenerateScale
                                 : z / cam.focal * spec.scale_multiplier;
            g.scale = Vector3d::Constant(s);
            g.opacity = spec.opacity;
            g.color = core::ShColor::from_rgb(
                Vector3d(pair.image.at(x, y, 0), pair.image.at(x, y, 1), pair.image.at(x, y, 2)));
            out.push_back(g);
        }
    }
    return out;
}

SyntheticScene synthesize(const SceneSpec& spec) {
    spec.validate();
    SyntheticScene scene;
    std::vector<DepthImagePair> pairs;
    if (spec.kind == SceneKind::DepthImagePair) {
        pairs = spec.pairs;
        scene.ground_truth = std::make_shared<PairGroundTruth>(spec.pairs);
    } else {
        auto gt = make_analytic(spec);
        for (const auto& cam : spec.context_cameras) pairs.push_back(depth_image(*gt, cam));
        scene.ground_truth = gt;
    }
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> jitter(-spec.depth_jitter, spec.depth_jitter);
    for (auto& pair : pairs) {
        if (spec.depth_jitter > 0.0) {
            for (float& d : pair.depth.data()) d = static_cast<float>(d * (1.0 + jitter(rng)));
        }
        auto g = unproject(pair, spec);
        scene.gaussians.insert(scene.gaussians.end(), g.begin(), g.end());
        scene.context_cameras.push_back(pair.camera);
    }
    return scene;
}

}  // namespace aasplat::scene
