#include "aasplat/metrics/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "aasplat/error.hpp"

namespace aasplat::metrics {

namespace {

void require_same_shape(const Image& a, const Image& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DimensionMismatch(std::string(what) + ": image shapes differ (" + std::to_string(a.width()) +
                                "x" + std::to_string(a.height()) + "x" + std::to_string(a.channels()) +
                                " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()) +
                                "x" + std::to_string(b.channels()) + ")");
    }
}

std::array<double, kSsimWindow> gaussian_window() {
    std::array<double, kSsimWindow> w{};
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - kSsimWindow / 2;
        w[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable 'valid' filtering of a w*h double plane.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::array<double, kSsimWindow>& k) {
    const int ow = w - kSsimWindow + 1;
    const int oh = h - kSsimWindow + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < kSsimWindow; ++i) s += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < kSsimWindow; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    return out;
}

double cubic_weight(double x) {
    constexpr double a = -0.5;
    x = std::abs(x);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

// Taps and weights mapping output index -> 4 clamped input indices.
struct Taps {
    std::array<int, 4> idx;
    std::array<double, 4> w;
};

std::vector<Taps> cubic_taps(int in_size, int factor) {
    std::vector<Taps> taps(static_cast<std::size_t>(in_size) * factor);
    for (std::size_t o = 0; o < taps.size(); ++o) {
        const double src = (static_cast<double>(o) + 0.5) / factor - 0.5;
        const double base = std::floor(src);
        for (int k = 0; k < 4; ++k) {
            const double pos = base - 1.0 + k;
            taps[o].idx[k] = std::clamp(static_cast<int>(pos), 0, in_size - 1);
            taps[o].w[k] = cubic_weight(src - pos);
        }
    }
    return taps;
}

}  // namespace

double psnr(const Image& a, const Image& b) {
    require_same_shape(a, b, "psnr");
    const auto da = a.data();
    const auto db = b.data();
    if (da.empty()) {
        throw InvalidArgument("psnr: empty images");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = static_cast<double>(da[i]) - db[i];
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(da.size());
    if (mse == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) {
    require_same_shape(a, b, "ssim");
    if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
        throw InvalidArgument("ssim: image side must be at least 11 pixels");
    }
    const Image la = luminance(a);
    const Image lb = luminance(b);
    const int w = a.width();
    const int h = a.height();
    const std::size_t n = la.pixel_count();
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = la.data()[i];
        y[i] = lb.data()[i];
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto k = gaussian_window();
    const auto mx = filter_valid(x, w, h, k);
    const auto my = filter_valid(y, w, h, k);
    const auto sxx = filter_valid(xx, w, h, k);
    const auto syy = filter_valid(yy, w, h, k);
    const auto sxy = filter_valid(xy, w, h, k);

    const double c1 = kSsimK1 * kSsimK1;
    const double c2 = kSsimK2 * kSsimK2;
    double total = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = sxx[i] - mx[i] * mx[i];
        const double vy = syy[i] - my[i] * my[i];
        const double cov = sxy[i] - mx[i] * my[i];
        const double num = (2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2);
        const double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2);
        total += num / den;
    }
    return total / static_cast<double>(mx.size());
}

Image box_downsample(const Image& image, int factor) {
    if (factor < 1 || image.width() % factor != 0 || image.height() % factor != 0) {
        throw DimensionMismatch("box_downsample: size not divisible by factor " + std::to_string(factor));
    }
    Image out(image.width() / factor, image.height() / factor, image.channels());
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            for (int c = 0; c < image.channels(); ++c) {
                double s = 0.0;
                for (int j = 0; j < factor; ++j) {
                    for (int i = 0; i < factor; ++i) {
                        s += image.at(x * factor + i, y * factor + j, c);
                    }
                }
                out.at(x, y, c) = static_cast<float>(s * inv);
            }
        }
    }
    return out;
}

Image bicubic_upsample(const Image& image, int factor) {
    if (factor < 1) {
        throw InvalidArgument("bicubic_upsample: factor must be >= 1");
    }
    if (factor == 1) {
        return image;
    }
    const auto tx = cubic_taps(image.width(), factor);
    const auto ty = cubic_taps(image.height(), factor);
    const int ow = image.width() * factor;
    const int oh = image.height() * factor;
    const int ch = image.channels();

    // Horizontal pass into doubles, then vertical.
    std::vector<double> tmp(static_cast<std::size_t>(ow) * image.height() * ch);
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < ow; ++x) {
            for (int c = 0; c < ch; ++c) {
                double s = 0.0;
                for (int k = 0; k < 4; ++k) s += tx[x].w[k] * image.at(tx[x].idx[k], y, c);
                tmp[(static_cast<std::size_t>(y) * ow + x) * ch + c] = s;
            }
        }
    }
    Image out(ow, oh, ch);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            for (int c = 0; c < ch; ++c) {
                double s = 0.0;
                for (int k = 0; k < 4; ++k) {
                    s += ty[y].w[k] * tmp[(static_cast<std::size_t>(ty[y].idx[k]) * ow + x) * ch + c];
                }
                out.at(x, y, c) = static_cast<float>(s);
            }
        }
    }
    return out;
}

Image resample(const Image& image, core::Factor factor) {
    if (!core::Factor::supported(factor.num, factor.den)) {
        throw InvalidArgument("resample: unsupported factor");
    }
    if (factor.is_identity()) return image;
    if (factor.is_downsample()) return box_downsample(image, factor.ratio());
    return bicubic_upsample(image, factor.ratio());
}

CoverageStats coverage_stats(const Image& render_coverage, const Image& gt_coverage) {
    require_same_shape(render_coverage, gt_coverage, "coverage_stats");
    CoverageStats s;
    std::size_t covered = 0;
    std::size_t holes = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < gt_coverage.data().size(); ++i) {
        if (gt_coverage.data()[i] < 0.5f) continue;
        const double c = render_coverage.data()[i];
        ++covered;
        sum += c;
        s.min = std::min(s.min, c);
        if (c < 0.5) ++holes;
    }
    if (covered > 0) {
        s.hole_fraction = static_cast<double>(holes) / covered;
        s.mean = sum / covered;
    }
    return s;
}

double brightening_ratio(const Image& render, const Image& reference) {
    require_same_shape(render, reference, "brightening_ratio");
    const Image lr = luminance(render);
    const Image lg = luminance(reference);
    double sr = 0.0;
    double sg = 0.0;
    for (std::size_t i = 0; i < lr.data().size(); ++i) {
        sr += lr.data()[i];
        sg += lg.data()[i];
    }
    return sg > 0.0 ? sr / sg : std::numeric_limits<double>::quiet_NaN();
}

MetricsReport evaluate(const Image& render, const Image& reference, double resolution_factor,
                       const Image* render_coverage, const Image* gt_coverage) {
    MetricsReport r;
    r.psnr = capped(psnr(render, reference));
    r.ssim = ssim(render, reference);
    r.brightening_ratio = brightening_ratio(render, reference);
    r.resolution_factor = resolution_factor;
    if (render_coverage && gt_coverage) {
        const auto cs = coverage_stats(*render_coverage, *gt_coverage);
        r.hole_fraction = cs.hole_fraction;
        r.covered_alpha_min = cs.min;
        r.covered_alpha_mean = cs.mean;
    }
    return r;
}

MetricsReport hrrc(const Image& render_hr, const Image& gt_lr, int factor) {
    if (factor < 1 || render_hr.width() != gt_lr.width() * factor ||
        render_hr.height() != gt_lr.height() * factor || render_hr.channels() != gt_lr.channels()) {
        throw DimensionMismatch("hrrc: render must be exactly factor x the ground-truth size");
    }
    return evaluate(render_hr, bicubic_upsample(gt_lr, factor), factor);
}

}  // namespace aasplat::metrics
