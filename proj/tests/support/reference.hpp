#pragma once

// Brute-force front-to-back compositor used as an oracle for the tiled
// rasterizer: every pixel walks every splat in depth order, no binning.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "aasplat/core/projection.hpp"
#include "aasplat/image.hpp"

namespace aasplat::testkit {

struct ReferenceImage {
    Image color;
    Image alpha;
};

inline ReferenceImage reference_composite(const std::vector<core::ProjectedGaussian>& splats, int width, int height,
                                          double cull_sigma = 3.0, double alpha_skip = 1.0 / 255.0,
                                          double t_stop = 1e-4) {
    std::vector<std::size_t> order(splats.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return splats[a].depth < splats[b].depth; });

    ReferenceImage out{Image(width, height, 3), Image(width, height, 1)};
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const Eigen::Vector2d p(x + 0.5, y + 0.5);
            double t = 1.0;
            Eigen::Vector3d c = Eigen::Vector3d::Zero();
            double a_sum = 0.0;
            for (std::size_t i : order) {
                const auto& s = splats[i];
                if (s.cov2d.determinant() <= 1e-12) continue;
                const Eigen::Vector2d d = p - s.mean2d;
                const double m = d.dot(s.cov2d.inverse() * d);
                if (m > cull_sigma * cull_sigma) continue;
                const double a = std::min(0.999, s.opacity * std::exp(-0.5 * m));
                if (a < alpha_skip) continue;
                c += s.color * a * t;
                a_sum += a * t;
                t *= 1.0 - a;
                if (t < t_stop) break;
            }
            for (int k = 0; k < 3; ++k) out.color.at(x, y, k) = static_cast<float>(c[k]);
            out.alpha.at(x, y) = static_cast<float>(a_sum);
        }
    }
    return out;
}

}  // namespace aasplat::testkit
