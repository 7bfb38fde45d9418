#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "aasplat/scene/scene.hpp"

namespace aasplat::scene {

struct Rect {
    double u0, v0, u1, v1;
    Eigen::Vector3d color;
};

// Textured plane p = origin + u*axis_u + v*axis_v, optionally bounded.
struct Layer {
    enum class Pattern { Uniform, Checker, Bars };

    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    Eigen::Vector3d axis_u = Eigen::Vector3d::UnitX();
    Eigen::Vector3d axis_v = Eigen::Vector3d::UnitY();
    bool bounded = false;
    double bu0 = 0, bv0 = 0, bu1 = 0, bv1 = 0;
    bool one_sided = false;  // visible only from the axis_u x axis_v side
    Pattern pattern = Pattern::Uniform;
    double period = 1.0;
    double width = 0.0;
    Eigen::Vector3d color_a = Eigen::Vector3d::Zero();
    Eigen::Vector3d color_b = Eigen::Vector3d::Zero();

    // Non-overlapping textured rectangles meeting [u0,u1]x[v0,v1].
    void rects(double u0, double v0, double u1, double v1, std::vector<Rect>& out) const;
    std::optional<Eigen::Vector3d> color_at(double u, double v) const;
    std::optional<double> intersect(const Eigen::Vector3d& eye, const Eigen::Vector3d& dir) const;
    bool faces(const Eigen::Vector3d& eye) const;
};

struct RayHit {
    double t;
    Eigen::Vector3d color;
};

// Foreground layers must not overlap each other on screen; whatever they
// leave uncovered shows the uniform backdrop, if any.
class AnalyticGroundTruth final : public GroundTruth {
public:
    AnalyticGroundTruth(std::vector<Layer> layers, std::optional<Layer> backdrop_plane,
                        std::optional<Eigen::Vector3d> backdrop)
        : layers_(std::move(layers)), backdrop_plane_(std::move(backdrop_plane)), backdrop_(std::move(backdrop)) {}

    bool analytic() const override { return true; }
    GroundTruthImage render(const core::Camera& camera) const override;
    std::optional<RayHit> trace(const Eigen::Vector3d& eye, const Eigen::Vector3d& dir) const;

private:
    std::vector<Layer> layers_;
    std::optional<Layer> backdrop_plane_;
    std::optional<Eigen::Vector3d> backdrop_;
};

class PairGroundTruth final : public GroundTruth {
public:
    explicit PairGroundTruth(std::vector<DepthImagePair> pairs) : pairs_(std::move(pairs)) {}

    bool analytic() const override { return false; }
    GroundTruthImage render(const core::Camera& camera) const override;

private:
    std::vector<DepthImagePair> pairs_;
};

std::shared_ptr<const AnalyticGroundTruth> make_analytic(const SceneSpec& spec);

}  // namespace aasplat::scene
