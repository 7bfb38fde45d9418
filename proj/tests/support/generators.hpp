#pragma once

// Seeded generators for property tests.

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "aasplat/core/gaussian.hpp"
#include "aasplat/core/projection.hpp"

namespace aasplat::testkit {

class Gen {
public:
    explicit Gen(unsigned seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

    Eigen::Quaterniond rotation() {
        Eigen::Vector4d v;
        for (int i = 0; i < 4; ++i) v[i] = std::normal_distribution<double>()(rng_);
        v.normalize();
        return Eigen::Quaterniond(v[0], v[1], v[2], v[3]);
    }

    Eigen::Vector3d color() { return {uniform(0, 1), uniform(0, 1), uniform(0, 1)}; }

    // Symmetric positive-definite 2x2 with condition number <= max_cond.
    Eigen::Matrix2d covariance2(double min_scale, double max_scale, double max_cond) {
        const double l1 = log_uniform(min_scale, max_scale);
        const double l2 = l1 * log_uniform(1.0 / max_cond, 1.0);
        const double th = uniform(0, 3.141592653589793);
        Eigen::Matrix2d r;
        r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        return r * Eigen::Vector2d(l1, l2).asDiagonal() * r.transpose();
    }

    core::ProjectedGaussian splat(int width, int height) {
        core::ProjectedGaussian s;
        s.mean2d = {uniform(-1.0, width + 1.0), uniform(-1.0, height + 1.0)};
        s.cov2d = covariance2(0.05, 6.0, 20.0);
        s.depth = uniform(0.5, 20.0);
        s.opacity = uniform(0.05, 1.0);
        s.color = color();
        return s;
    }

    std::mt19937& engine() { return rng_; }

private:
    std::mt19937 rng_;
};

}  // namespace aasplat::testkit
