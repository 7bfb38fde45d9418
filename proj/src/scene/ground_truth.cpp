#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "aasplat/error.hpp"
#include "aasplat/metrics/metrics.hpp"
#include "aasplat/scene/scene.hpp"
#include "scene_internal.hpp"

namespace aasplat::scene {

using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

using Polygon = std::vector<Vector2d>;

// Sutherland-Hodgman against one axis-aligned half plane: keep side*(p[axis]-bound) >= 0.
void clip_axis(const Polygon& in, Polygon& out, int axis, double bound, double side) {
    out.clear();
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vector2d& a = in[i];
        const Vector2d& b = in[(i + 1) % n];
        const double da = side * (a[axis] - bound);
        const double db = side * (b[axis] - bound);
        if (da >= 0.0) out.push_back(a);
        if ((da >= 0.0) != (db >= 0.0)) {
            const double t = da / (da - db);
            Vector2d p = a + t * (b - a);
            p[axis] = bound;
            out.push_back(p);
        }
    }
}

double shoelace(const Polygon& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vector2d& a = p[i];
        const Vector2d& b = p[(i + 1) % p.size()];
        s += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * std::abs(s);
}

// Area of a convex polygon inside the unit pixel [x,x+1]x[y,y+1].
double pixel_overlap(const Polygon& poly, int x, int y, Polygon& a, Polygon& b) {
    clip_axis(poly, a, 0, x, 1.0);
    if (a.size() < 3) return 0.0;
    clip_axis(a, b, 0, x + 1.0, -1.0);
    if (b.size() < 3) return 0.0;
    clip_axis(b, a, 1, y, 1.0);
    if (a.size() < 3) return 0.0;
    clip_axis(a, b, 1, y + 1.0, -1.0);
    if (b.size() < 3) return 0.0;
    return shoelace(b);
}

// Camera-space quad clipped to z >= near, then projected.
Polygon project_quad(const std::array<Vector3d, 4>& world, const core::Camera& cam) {
    std::vector<Vector3d> in;
    for (const auto& p : world) in.push_back(cam.to_camera(p));
    std::vector<Vector3d> clipped;
    const double near = cam.near_plane;
    for (std::size_t i = 0; i < in.size(); ++i) {
        const Vector3d& a = in[i];
        const Vector3d& b = in[(i + 1) % in.size()];
        const bool ia = a.z() >= near;
        const bool ib = b.z() >= near;
        if (ia) clipped.push_back(a);
        if (ia != ib) {
            const double t = (near - a.z()) / (b.z() - a.z());
            clipped.push_back(a + t * (b - a));
        }
    }
    Polygon out;
    for (const auto& p : clipped) out.push_back(cam.project_point(p));
    return out;
}

}  // namespace

void Layer::rects(double u0, double v0, double u1, double v1, std::vector<Rect>& out) const {
    if (bounded) {
        u0 = std::max(u0, bu0);
        v0 = std::max(v0, bv0);
        u1 = std::min(u1, bu1);
        v1 = std::min(v1, bv1);
    }
    if (u0 >= u1 || v0 >= v1) return;
    auto emit = [&](double a0, double b0, double a1, double b1, const Vector3d& c) {
        a0 = std::max(a0, u0);
        b0 = std::max(b0, v0);
        a1 = std::min(a1, u1);
        b1 = std::min(b1, v1);
        if (a0 < a1 && b0 < b1) out.push_back({a0, b0, a1, b1, c});
    };
    switch (pattern) {
    case Pattern::Uniform:
        emit(u0, v0, u1, v1, color_a);
        break;
    case Pattern::Checker: {
        const auto i0 = static_cast<long>(std::floor(u0 / period));
        const auto i1 = static_cast<long>(std::floor(u1 / period));
        const auto j0 = static_cast<long>(std::floor(v0 / period));
        const auto j1 = static_cast<long>(std::floor(v1 / period));
        for (long j = j0; j <= j1; ++j) {
            for (long i = i0; i <= i1; ++i) {
                const bool even = ((i + j) % 2 + 2) % 2 == 0;
                emit(i * period, j * period, (i + 1) * period, (j + 1) * period, even ? color_a : color_b);
            }
        }
        break;
    }
    case Pattern::Bars: {
        const auto i0 = static_cast<long>(std::floor(u0 / period));
        const auto i1 = static_cast<long>(std::floor(u1 / period));
        const auto j0 = static_cast<long>(std::floor(v0 / period));
        const auto j1 = static_cast<long>(std::floor(v1 / period));
        for (long j = j0; j <= j1; ++j) {
            for (long i = i0; i <= i1; ++i) {
                const double a = i * period;
                const double b = j * period;
                emit(a, b, a + width, b + period, color_a);
                emit(a + width, b, a + period, b + width, color_a);
            }
        }
        break;
    }
    }
}

std::optional<Vector3d> Layer::color_at(double u, double v) const {
    if (bounded && (u < bu0 || u > bu1 || v < bv0 || v > bv1)) return std::nullopt;
    switch (pattern) {
    case Pattern::Uniform:
        return color_a;
    case Pattern::Checker: {
        const auto i = static_cast<long>(std::floor(u / period));
        const auto j = static_cast<long>(std::floor(v / period));
        return ((i + j) % 2 + 2) % 2 == 0 ? color_a : color_b;
    }
    case Pattern::Bars: {
        const double fu = u - std::floor(u / period) * period;
        const double fv = v - std::floor(v / period) * period;
        if (fu < width || fv < width) return color_a;
        return std::nullopt;
    }
    }
    return std::nullopt;
}

std::optional<double> Layer::intersect(const Vector3d& origin_w, const Vector3d& dir_w) const {
    const Vector3d n = axis_u.cross(axis_v);
    const double denom = n.dot(dir_w);
    if (std::abs(denom) < 1e-15) return std::nullopt;
    const double t = n.dot(origin - origin_w) / denom;
    if (t <= 0.0) return std::nullopt;
    return t;
}

bool Layer::faces(const Vector3d& eye) const {
    if (!one_sided) return true;
    return axis_u.cross(axis_v).dot(eye - origin) > 0.0;
}

GroundTruthImage AnalyticGroundTruth::render(const core::Camera& cam) const {
    cam.validate();
    const int w = cam.width;
    const int h = cam.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<double> cov(n, 0.0);
    std::vector<double> col(n * 3, 0.0);

    const Vector3d eye = cam.position();
    const Eigen::Matrix3d rt = cam.rotation.transpose();
    auto ray = [&](double px, double py) {
        return Vector3d(rt * Vector3d((px - cam.principal.x()) / cam.focal, (py - cam.principal.y()) / cam.focal, 1.0));
    };

    std::vector<Rect> rects;
    Polygon scratch_a;
    Polygon scratch_b;
    for (const Layer& layer : layers_) {
        if (!layer.faces(eye)) continue;

        // Visible parameter range: back-project the image corners.
        double u0 = 0, v0 = 0, u1 = 0, v1 = 0;
        bool ok = true;
        bool first = true;
        for (const auto& c : {Vector2d(0, 0), Vector2d(w, 0), Vector2d(0, h), Vector2d(w, h)}) {
            const Vector3d d = ray(c.x(), c.y());
            const auto t = layer.intersect(eye, d);
            if (!t) {
                ok = false;
                break;
            }
            const Vector3d p = eye + *t * d - layer.origin;
            const double u = p.dot(layer.axis_u);
            const double v = p.dot(layer.axis_v);
            u0 = first ? u : std::min(u0, u);
            u1 = first ? u : std::max(u1, u);
            v0 = first ? v : std::min(v0, v);
            v1 = first ? v : std::max(v1, v);
            first = false;
        }
        if (!ok) {
            if (!layer.bounded) {
                throw InvalidArgument("ground truth: unbounded plane does not cover the view");
            }
            u0 = layer.bu0;
            v0 = layer.bv0;
            u1 = layer.bu1;
            v1 = layer.bv1;
        }
        rects.clear();
        layer.rects(u0, v0, u1, v1, rects);

        for (const Rect& r : rects) {
            const std::array<Vector3d, 4> corners{
                layer.origin + r.u0 * layer.axis_u + r.v0 * layer.axis_v,
                layer.origin + r.u1 * layer.axis_u + r.v0 * layer.axis_v,
                layer.origin + r.u1 * layer.axis_u + r.v1 * layer.axis_v,
                layer.origin + r.u0 * layer.axis_u + r.v1 * layer.axis_v,
            };
            const Polygon poly = project_quad(corners, cam);
            if (poly.size() < 3) continue;
            double minx = poly[0].x(), maxx = poly[0].x(), miny = poly[0].y(), maxy = poly[0].y();
            for (const auto& p : poly) {
                minx = std::min(minx, p.x());
                maxx = std::max(maxx, p.x());
                miny = std::min(miny, p.y());
                maxy = std::max(maxy, p.y());
            }
            const int x0 = std::max(0, static_cast<int>(std::floor(minx)));
            const int x1 = std::min(w - 1, static_cast<int>(std::ceil(maxx)) - 1);
            const int y0 = std::max(0, static_cast<int>(std::floor(miny)));
            const int y1 = std::min(h - 1, static_cast<int>(std::ceil(maxy)) - 1);
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    const double a = pixel_overlap(poly, x, y, scratch_a, scratch_b);
                    if (a <= 0.0) continue;
                    const std::size_t i = static_cast<std::size_t>(y) * w + x;
                    cov[i] += a;
                    for (int c = 0; c < 3; ++c) col[i * 3 + c] += a * r.color[c];
                }
            }
        }
    }

    GroundTruthImage out{Image(w, h, 3), Image(w, h, 1)};
    for (std::size_t i = 0; i < n; ++i) {
        double c = std::min(1.0, cov[i]);
        Vector3d rgb(col[i * 3], col[i * 3 + 1], col[i * 3 + 2]);
        if (backdrop_) {
            rgb += (1.0 - c) * *backdrop_;
            c = 1.0;
        }
        for (int k = 0; k < 3; ++k) out.color.data()[i * 3 + k] = static_cast<float>(std::clamp(rgb[k], 0.0, 1.0));
        out.coverage.data()[i] = static_cast<float>(c);
    }
    return out;
}

std::optional<RayHit> AnalyticGroundTruth::trace(const Vector3d& eye, const Vector3d& dir) const {
    std::optional<RayHit> best;
    for (const Layer& layer : layers_) {
        if (!layer.faces(eye)) continue;
        const auto t = layer.intersect(eye, dir);
        if (!t || (best && *t >= best->t)) continue;
        const Vector3d p = eye + *t * dir - layer.origin;
        const auto c = layer.color_at(p.dot(layer.axis_u), p.dot(layer.axis_v));
        if (c) best = RayHit{*t, *c};
    }
    if (!best && backdrop_plane_) {
        if (const auto t = backdrop_plane_->intersect(eye, dir)) best = RayHit{*t, *backdrop_};
    }
    return best;
}

GroundTruthImage PairGroundTruth::render(const core::Camera& cam) const {
    for (const auto& pair : pairs_) {
        const core::Camera& base = pair.camera;
        if (!(cam.rotation == base.rotation) || !(cam.translation == base.translation)) continue;
        for (const core::Factor f : {core::Factor{1, 1}, core::Factor{1, 2}, core::Factor{1, 4}}) {
            const core::Camera s = base.scaled(f);
            if (s.width != cam.width || s.height != cam.height || s.focal != cam.focal) continue;
            GroundTruthImage out;
            out.color = f.is_identity() ? pair.image : metrics::box_downsample(pair.image, f.ratio());
            out.coverage = Image(cam.width, cam.height, 1, 1.0f);
            return out;
        }
    }
    throw InvalidArgument("ground truth: image-pair scenes only provide references at or below the context resolution");
}

}  // namespace aasplat::scene
