#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "aasplat/core/camera.hpp"
#include "aasplat/core/factor.hpp"
#include "aasplat/core/gaussian.hpp"
#include "aasplat/core/projection.hpp"
#include "aasplat/error.hpp"
#include "aasplat/image.hpp"
#include "aasplat/parallel.hpp"
#include "support/generators.hpp"

using namespace aasplat;
using core::Camera;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

// Quaternion to matrix written out by hand so the covariance check does not
// lean on Eigen's conversion.
Matrix3d quat_matrix(double w, double x, double y, double z) {
    Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

Camera front_camera(int w = 64, int h = 48, double f = 50.0) {
    return Camera::look_at({0, 0, 0}, {0, 0, 1}, {0, -1, 0}, w, h, f);
}

}  // namespace

TEST(Factor, ParsesFractionsAndDecimals) {
    EXPECT_EQ(core::Factor::parse("1/4"), (core::Factor{1, 4}));
    EXPECT_EQ(core::Factor::parse("0.5"), (core::Factor{1, 2}));
    EXPECT_EQ(core::Factor::parse("4"), (core::Factor{4, 1}));
    EXPECT_EQ(core::Factor::parse("1").label(), "1");
    EXPECT_EQ(core::Factor::parse("1/4").label(), "0.25");
    EXPECT_THROW(core::Factor::parse("3"), InvalidArgument);
    EXPECT_THROW(core::Factor::parse("1/8"), InvalidArgument);
    EXPECT_THROW(core::Factor::parse("abc"), InvalidArgument);
    EXPECT_EQ(core::Factor::parse("1/4").ratio(), 4);
    EXPECT_TRUE(core::Factor::parse("2").is_upsample());
}

TEST(Covariance, IdentityRotationGivesSquaredScales) {
    const auto c = core::build_covariance({0.5, 2.0, 3.0}, Eigen::Quaterniond::Identity());
    EXPECT_NEAR(c.matrix()(0, 0), 0.25, 1e-15);
    EXPECT_NEAR(c.matrix()(1, 1), 4.0, 1e-15);
    EXPECT_NEAR(c.matrix()(2, 2), 9.0, 1e-15);
    EXPECT_NEAR(c.matrix()(0, 1), 0.0, 1e-15);
}

TEST(Covariance, MatchesHandExpandedRotationAndIsPsd) {
    testkit::Gen gen(7);
    for (int i = 0; i < 200; ++i) {
        const auto q = gen.rotation();
        const Vector3d s(gen.log_uniform(1e-4, 10), gen.log_uniform(1e-4, 10), gen.log_uniform(1e-4, 10));
        const auto c = core::build_covariance(s, q);
        const Matrix3d r = quat_matrix(q.w(), q.x(), q.y(), q.z());
        const Matrix3d expected = r * s.array().square().matrix().asDiagonal() * r.transpose();
        EXPECT_LE((c.matrix() - expected).norm(), 1e-12 * expected.norm());
        EXPECT_TRUE(c.is_symmetric());
        EXPECT_TRUE(c.is_psd());
    }
}

TEST(Covariance, RotationNormTolerance) {
    EXPECT_NO_THROW(core::normalized_rotation(Eigen::Quaterniond(1.00005, 0, 0, 0)));
    EXPECT_NEAR(core::normalized_rotation(Eigen::Quaterniond(1.00005, 0, 0, 0)).norm(), 1.0, 1e-15);
    EXPECT_THROW(core::normalized_rotation(Eigen::Quaterniond(1.001, 0, 0, 0)), InvalidRotation);
    EXPECT_THROW(core::build_covariance({1, 1, 1}, Eigen::Quaterniond(2, 0, 0, 0)), InvalidRotation);
}

TEST(Color, DegreeZeroRoundTrip) {
    core::Gaussian3D g;
    g.color = core::ShColor::from_rgb({0.2, 0.5, 0.9});
    const Vector3d c = core::evaluate_color(g, {0, 0, 1});
    EXPECT_NEAR(c.x(), 0.2, 1e-12);
    EXPECT_NEAR(c.y(), 0.5, 1e-12);
    EXPECT_NEAR(c.z(), 0.9, 1e-12);
    EXPECT_EQ(g.color.degree(), 0);
}

TEST(Color, DegreeOneBandAndClamp) {
    core::Gaussian3D g;
    g.color.dc = Vector3d::Zero();
    g.color.band1 = std::array<Vector3d, 3>{Vector3d(0.1, 0, 0), Vector3d(0, 0.2, 0), Vector3d(0, 0, 0.3)};
    const Vector3d d = Vector3d(0.3, -0.4, 0.5).normalized();
    const Vector3d c = core::evaluate_color(g, d);
    const double c1 = 0.4886025119029199;
    EXPECT_NEAR(c.x(), 0.5 + c1 * (-d.y() * 0.1), 1e-12);
    EXPECT_NEAR(c.y(), 0.5 + c1 * (d.z() * 0.2), 1e-12);
    EXPECT_NEAR(c.z(), 0.5 + c1 * (-d.x() * 0.3), 1e-12);

    g.color.band1.reset();
    g.color.dc = Vector3d(10, -10, 0);
    const Vector3d clamped = core::evaluate_color(g, d);
    EXPECT_EQ(clamped.x(), 1.0);
    EXPECT_EQ(clamped.y(), 0.0);
}

TEST(Gaussian, ValidateRejectsBadFields) {
    core::Gaussian3D g;
    EXPECT_NO_THROW(core::validate(g));
    g.scale.x() = 0.0;
    EXPECT_THROW(core::validate(g), InvalidArgument);
    g.scale.x() = 1.0;
    g.opacity = 1.5;
    EXPECT_THROW(core::validate(g), InvalidArgument);
}

TEST(Camera, LookAtAndProjection) {
    const Camera cam = front_camera();
    EXPECT_NO_THROW(cam.validate());
    EXPECT_NEAR((cam.rotation - Matrix3d::Identity()).norm(), 0.0, 1e-15);
    const Eigen::Vector2d c = cam.project_point({0, 0, 3});
    EXPECT_DOUBLE_EQ(c.x(), 32.0);
    EXPECT_DOUBLE_EQ(c.y(), 24.0);
    const Eigen::Vector2d p = cam.project_point({1, 2, 4});
    EXPECT_DOUBLE_EQ(p.x(), 32.0 + 50.0 / 4.0);
    EXPECT_DOUBLE_EQ(p.y(), 24.0 + 100.0 / 4.0);

    const Camera moved = Camera::look_at({1, 2, 3}, {1, 2, 10}, {0, -1, 0}, 8, 8, 8);
    EXPECT_NEAR((moved.position() - Vector3d(1, 2, 3)).norm(), 0.0, 1e-12);
    EXPECT_NEAR((moved.to_world(moved.to_camera({4, 5, 6})) - Vector3d(4, 5, 6)).norm(), 0.0, 1e-12);
}

TEST(Camera, ScaledKeepsPoseAndScalesIntrinsics) {
    const Camera cam = front_camera(64, 48, 50);
    const Camera up = cam.scaled({2, 1});
    EXPECT_EQ(up.width, 128);
    EXPECT_EQ(up.height, 96);
    EXPECT_DOUBLE_EQ(up.focal, 100.0);
    EXPECT_DOUBLE_EQ(up.principal.x(), 64.0);
    const Camera down = cam.scaled({1, 4});
    EXPECT_EQ(down.width, 16);
    EXPECT_EQ(down.height, 12);
    EXPECT_THROW(front_camera(30, 30, 10).scaled({1, 4}), InvalidArgument);
}

TEST(Camera, ValidateRejectsBadIntrinsics) {
    Camera cam = front_camera();
    cam.focal = -1;
    EXPECT_THROW(cam.validate(), InvalidArgument);
    cam = front_camera();
    cam.rotation(0, 0) = 2;
    EXPECT_THROW(cam.validate(), InvalidArgument);
    EXPECT_THROW(Camera::look_at({0, 0, 0}, {0, 1, 0}, {0, 1, 0}, 4, 4, 4), InvalidArgument);
}

TEST(Projection, CovarianceMatchesNumericJacobian) {
    testkit::Gen gen(11);
    const Camera cam = Camera::look_at({0.3, -0.2, -1}, {0, 0, 5}, {0, -1, 0}, 64, 64, 70);
    for (int i = 0; i < 100; ++i) {
        core::Gaussian3D g;
        g.center = {gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(2, 8)};
        g.scale = {gen.log_uniform(0.01, 0.5), gen.log_uniform(0.01, 0.5), gen.log_uniform(0.01, 0.5)};
        g.rotation = gen.rotation();
        const auto pg = core::project(g, cam);
        ASSERT_TRUE(pg);

        // Oracle: central-difference Jacobian of world -> pixel.
        Eigen::Matrix<double, 2, 3> jac;
        const double h = 1e-6;
        for (int k = 0; k < 3; ++k) {
            Vector3d a = g.center, b = g.center;
            a[k] += h;
            b[k] -= h;
            jac.col(k) = (cam.project_point(cam.to_camera(a)) - cam.project_point(cam.to_camera(b))) / (2 * h);
        }
        const Matrix3d sigma = core::build_covariance(g.scale, g.rotation).matrix();
        const Eigen::Matrix2d expected = jac * sigma * jac.transpose();
        EXPECT_LE((pg->cov2d - expected).norm(), 1e-6 * expected.norm());
        EXPECT_LE((pg->mean2d - cam.project_point(cam.to_camera(g.center))).norm(), 1e-12);
        EXPECT_NEAR(pg->depth, cam.to_camera(g.center).z(), 1e-12);
    }
}

TEST(Projection, BehindNearPlaneIsCulled) {
    const Camera cam = front_camera();
    core::Gaussian3D g;
    g.center = {0, 0, -1};
    EXPECT_FALSE(core::project(g, cam));
    g.center = {0, 0, cam.near_plane};
    EXPECT_FALSE(core::project(g, cam));
    g.center = {0, 0, 1};
    EXPECT_TRUE(core::project(g, cam));
}

TEST(Projection, CopiesOpacityAndShadesColor) {
    core::Gaussian3D g;
    g.center = {0, 0, 2};
    g.opacity = 0.37;
    g.color = core::ShColor::from_rgb({0.1, 0.6, 0.3});
    const auto pg = core::project(g, front_camera());
    ASSERT_TRUE(pg);
    EXPECT_DOUBLE_EQ(pg->opacity, 0.37);
    EXPECT_NEAR(pg->color.y(), 0.6, 1e-12);
}

TEST(ImageOps, LuminanceWeights) {
    Image rgb(1, 1, 3);
    rgb.at(0, 0, 0) = 1.0f;
    EXPECT_NEAR(luminance(rgb).at(0, 0), 0.299, 1e-6);
    rgb.at(0, 0, 1) = 1.0f;
    rgb.at(0, 0, 2) = 1.0f;
    EXPECT_NEAR(luminance(rgb).at(0, 0), 1.0, 1e-6);
}

TEST(Parallel, VisitsEveryIndexOnceAndRethrows) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 5) throw InvalidArgument("boom"); }),
                 InvalidArgument);
}
