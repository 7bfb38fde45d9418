#pragma once

#include <limits>

#include "aasplat/core/factor.hpp"
#include "aasplat/image.hpp"

namespace aasplat::metrics {

/// Reported PSNR ceiling for identical images.
inline constexpr double kPsnrCap = 99.0;

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// 10 log10(1 / MSE) over every channel of two [0,1] images; +infinity when
/// they are identical. Throws DimensionMismatch.
double psnr(const Image& a, const Image& b);

inline double capped(double psnr_db) { return psnr_db > kPsnrCap ? kPsnrCap : psnr_db; }

/// Mean SSIM on luminance over all valid 11x11 Gaussian windows.
/// Throws DimensionMismatch or InvalidArgument (side < 11).
double ssim(const Image& a, const Image& b);

/// Box average over factor x factor blocks.
Image box_downsample(const Image& image, int factor);

/// Catmull-Rom (a = -0.5) bicubic upsampling with clamped edges.
Image bicubic_upsample(const Image& image, int factor);

/// Box filter for factors below one, bicubic above, copy at one.
Image resample(const Image& image, core::Factor factor);

struct MetricsReport {
    double psnr = 0.0;  // dB, capped at kPsnrCap
    double ssim = 0.0;
    double hole_fraction = std::numeric_limits<double>::quiet_NaN();
    double brightening_ratio = std::numeric_limits<double>::quiet_NaN();
    double resolution_factor = 1.0;
    double covered_alpha_min = std::numeric_limits<double>::quiet_NaN();
    double covered_alpha_mean = std::numeric_limits<double>::quiet_NaN();
};

/// Fraction of GT-covered pixels (gt_coverage >= 0.5) whose rendered coverage
/// is below 0.5, plus min/mean coverage over the same pixels.
struct CoverageStats {
    double hole_fraction = 0.0;
    double min = 1.0;
    double mean = 1.0;
};
CoverageStats coverage_stats(const Image& render_coverage, const Image& gt_coverage);

/// Mean rendered luminance over mean reference luminance.
double brightening_ratio(const Image& render, const Image& reference);

/// PSNR/SSIM/brightening of a render against a same-size reference; hole
/// statistics are filled when both coverage images are given.
MetricsReport evaluate(const Image& render, const Image& reference, double resolution_factor,
                       const Image* render_coverage = nullptr, const Image* gt_coverage = nullptr);

/// High-resolution rendering consistency: compares a render against the
/// low-resolution ground truth upsampled by `factor`.
MetricsReport hrrc(const Image& render_hr, const Image& gt_lr, int factor);

}  // namespace aasplat::metrics
