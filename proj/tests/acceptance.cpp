// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "aasplat/cli/commands.hpp"
#include "aasplat/cli/config.hpp"
#include "aasplat/core/gaussian.hpp"
#include "aasplat/filters/filters.hpp"
#include "aasplat/metrics/metrics.hpp"
#include "aasplat/raster/image_io.hpp"
#include "aasplat/raster/rasterizer.hpp"
#include "aasplat/scene/scene.hpp"
#include "support/generators.hpp"
#include "support/reference.hpp"

namespace fs = std::filesystem;
using namespace aasplat;
using filters::FilterConfig;
using filters::Regime;
using Clock = std::chrono::steady_clock;

namespace {

int g_failed = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    std::printf("%s  [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failed;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

core::Camera pixel_camera(int w, int h) {
    return core::Camera::look_at({0, 0, 0}, {0, 0, 1}, {0, -1, 0}, w, h, static_cast<double>(w));
}

fs::path source_dir() { return fs::path(AASPLAT_SOURCE_DIR); }

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("aasplat_accept_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void criterion_oracle_equivalence() {
    const auto t0 = Clock::now();
    testkit::Gen gen(2024);
    double worst = 0.0;
    for (int scene = 0; scene < 50; ++scene) {
        std::vector<core::ProjectedGaussian> splats;
        const int n = gen.integer(1, 8);
        for (int i = 0; i < n; ++i) splats.push_back(gen.splat(8, 8));
        raster::RenderSettings rs;
        rs.tile_size = gen.integer(1, 8);
        const auto fb = raster::rasterize(splats, pixel_camera(8, 8), FilterConfig::for_regime(Regime::VanillaDilation), rs);
        const auto ref = testkit::reference_composite(splats, 8, 8);
        for (std::size_t k = 0; k < ref.color.data().size(); ++k)
            worst = std::max(worst, std::abs(static_cast<double>(fb.color.data()[k]) - ref.color.data()[k]));
        for (std::size_t k = 0; k < ref.alpha.data().size(); ++k)
            worst = std::max(worst, std::abs(static_cast<double>(fb.alpha.data()[k]) - ref.alpha.data()[k]));
    }
    const double secs = seconds_since(t0);
    report(1, worst <= 1e-6 && secs < 10.0, "tiled rasterizer vs naive compositor",
           fmt("max |diff| %.3g over 50 scenes (tol 1e-6), %.3f s (limit 10 s)", worst, secs));
}

// Midpoint rule on a grid aligned with the principal axes, +-10 sigma.
double integrated_mass(const core::ProjectedGaussian& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s.cov2d);
    const Eigen::Vector2d sd = es.eigenvalues().cwiseSqrt();
    const int n = 400;
    const double hu = 20.0 * sd[0] / n, hv = 20.0 * sd[1] / n;
    const Eigen::Matrix2d inv = s.cov2d.inverse();
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double v = -10.0 * sd[1] + (j + 0.5) * hv;
        for (int i = 0; i < n; ++i) {
            const double u = -10.0 * sd[0] + (i + 0.5) * hu;
            const Eigen::Vector2d d = u * es.eigenvectors().col(0) + v * es.eigenvectors().col(1);
            sum += std::exp(-0.5 * d.dot(inv * d));
        }
    }
    return s.opacity * sum * hu * hv;
}

void criterion_mip_mass() {
    testkit::Gen gen(77);
    double worst_mip = 0.0, min_vanilla = 1e300;
    std::vector<std::pair<double, double>> footprint_ratio;
    for (int i = 0; i < 100; ++i) {
        core::ProjectedGaussian s;
        s.cov2d = gen.covariance2(1e-3, 1e2, 1e4);
        s.opacity = gen.uniform(0.05, 1.0);
        const double m0 = integrated_mass(s);
        const double mm = integrated_mass(filters::mip_2d(s, 0.1));
        const double mv = integrated_mass(filters::dilate_vanilla(s, 0.1));
        worst_mip = std::max(worst_mip, std::abs(mm - m0) / m0);
        min_vanilla = std::min(min_vanilla, mv / m0);
        footprint_ratio.emplace_back(std::sqrt(s.cov2d.determinant()), mv / m0);
    }
    std::sort(footprint_ratio.begin(), footprint_ratio.end());
    double min_quartile = 1e300;
    for (std::size_t i = 0; i < footprint_ratio.size() / 4; ++i) min_quartile = std::min(min_quartile, footprint_ratio[i].second);
    report(2, worst_mip <= 1e-4 && min_vanilla >= 1.0 && min_quartile > 1.5, "Mip mass preservation",
           fmt("Mip max rel mass error %.3g (tol 1e-4); vanilla mass ratio min %.4f (>= 1), "
               "smallest-footprint quartile min %.3f (> 1.5)",
               worst_mip, min_vanilla, min_quartile));
}

void criterion_blpf_floor() {
    testkit::Gen gen(99);
    int below = 0, unseen = 0, rate_mismatch = 0;
    double worst = 0.0;
    const double sigma_s = 0.2;
    for (int i = 0; i < 1000; ++i) {
        std::vector<core::Camera> cams;
        const int ncam = gen.integer(1, 4);
        for (int c = 0; c < ncam; ++c) {
            const Eigen::Vector3d eye(gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-6, -1));
            cams.push_back(core::Camera::look_at(eye, {0, 0, 0}, {0, -1, 0}, 64, 48, gen.log_uniform(20, 300)));
        }
        const Eigen::Vector3d center(gen.uniform(-0.5, 0.5), gen.uniform(-0.5, 0.5), gen.uniform(-0.5, 0.5));
        const Eigen::Vector3d scale(gen.log_uniform(1e-7, 1), gen.log_uniform(1e-7, 1), gen.log_uniform(1e-7, 1));
        const auto q = gen.rotation();

        // Independent rate: max f/z over views whose image (plus margin) holds the center.
        double nu = 0.0, fallback = 0.0;
        for (const auto& cam : cams) {
            const Eigen::Vector3d p = cam.rotation * center + cam.translation;
            const double u = cam.focal * p.x() / p.z() + cam.principal.x();
            const double v = cam.focal * p.y() / p.z() + cam.principal.y();
            if (p.z() > cam.near_plane && u >= -0.15 * cam.width && u <= 1.15 * cam.width &&
                v >= -0.15 * cam.height && v <= 1.15 * cam.height)
                nu = std::max(nu, cam.focal / p.z());
            fallback = std::max(fallback, cam.focal / std::abs(p.z()));
        }
        const auto bound = filters::maximal_sampling_rate(center, cams, sigma_s);
        if (nu == 0.0) {
            ++unseen;
            nu = fallback;
        }
        if (std::abs(bound.nu_hat - nu) > 1e-12 * nu) {
            ++rate_mismatch;
            continue;
        }
        const double floor = sigma_s / nu;
        const Eigen::Vector3d reg = filters::blpf3d_apply(scale, bound);
        for (int k = 0; k < 3; ++k)
            if (!(reg[k] >= floor)) ++below;
        const Eigen::Matrix3d rebuilt = core::build_covariance(reg, q).matrix();
        const Eigen::Matrix3d expected =
            core::build_covariance(scale, q).matrix() + floor * floor * Eigen::Matrix3d::Identity();
        worst = std::max(worst, (rebuilt - expected).norm() / expected.norm());
    }
    report(3, below == 0 && rate_mismatch == 0 && worst <= 1e-9, "3D band-limiting floor",
           fmt("%.0f floor violations, %.0f sampling-rate mismatches over 1000 primitives (%.0f seen by no view); "
               "covariance rel error %.3g (tol 1e-9)",
               below, rate_mismatch, unseen, worst));
}

void criterion_erosion() {
    const auto t0 = Clock::now();
    scene::SceneSpec spec;
    spec.kind = scene::SceneKind::CheckerPlane;
    spec.scale_policy = scene::ScalePolicy::Degenerate;
    spec.context_cameras = {core::Camera::look_at({0, 0, 0}, {0, 0, 1}, {0, -1, 0}, 256, 256, 256)};
    const auto sc = scene::synthesize(spec);
    const core::Camera cam = spec.context_cameras[0].scaled({4, 1});
    const auto gt = sc.ground_truth->render(cam);
    raster::RenderSettings rs;
    rs.threads = 0;
    const auto vanilla = raster::render(sc.gaussians, cam, sc.context_cameras,
                                        FilterConfig::for_regime(Regime::VanillaDilation), rs);
    const auto obbl = raster::render(sc.gaussians, cam, sc.context_cameras, FilterConfig::for_regime(Regime::ObblFull), rs);
    const auto sv = metrics::coverage_stats(vanilla.coverage, gt.coverage);
    const auto so = metrics::coverage_stats(obbl.coverage, gt.coverage);
    const double secs = seconds_since(t0);
    report(4, sv.hole_fraction > 0.10 && so.hole_fraction < 0.01 && so.min >= 0.9 && secs < 60.0,
           "erosion at 4x on degenerate checker",
           fmt("vanilla holes %.4f (> 0.10); OBBL holes %.4f (< 0.01), covered alpha min %.4f (>= 0.9); %.1f s",
               sv.hole_fraction, so.hole_fraction, so.min, secs) +
               " at " + std::to_string(cam.width) + "x" + std::to_string(cam.height));
}

cli::RunConfig suite_config(const fs::path& out) {
    auto cfg = cli::load_config(source_dir() / "configs" / "suite.yaml");
    cfg.output = out;
    return cfg;
}

void criterion_brightening() {
    auto cfg = suite_config(scratch("bright"));
    cfg.scenes.erase(std::remove_if(cfg.scenes.begin(), cfg.scenes.end(), [](const auto& s) { return s.name != "grid"; }),
                     cfg.scenes.end());
    cfg.factors = {{1, 4}};
    cfg.regimes.clear();
    for (Regime r : filters::all_regimes()) cfg.regimes.push_back(FilterConfig::for_regime(r));
    const auto results = cli::run_jobs(cfg, false);
    bool pass = !results.empty();
    std::ostringstream detail;
    for (const auto& r : results) {
        const auto& fc = cfg.regimes[r.job.regime];
        if (!r.ok || !r.report) {
            pass = false;
            detail << filters::regime_name(fc.regime) << " failed (" << r.error << ") ";
            continue;
        }
        const double b = r.report->brightening_ratio;
        detail << filters::regime_name(fc.regime) << " " << fmt("%.3f", b) << "  ";
        if (fc.regime == Regime::VanillaDilation) pass = pass && b > 1.2;
        else if (fc.uses_mip()) pass = pass && b >= 0.95 && b <= 1.05;
    }
    report(5, pass, "brightening at 1/4x on thin grid",
           "ratios " + detail.str() + "(vanilla > 1.2; mip, blpf3d_mip, obbl in [0.95, 1.05]; dilation variants unchecked)");
}

void criterion_ablation() {
    auto cfg = suite_config(scratch("ablation"));
    cfg.regimes = {FilterConfig::for_regime(Regime::VanillaDilation), FilterConfig::for_regime(Regime::Mip2D),
                   FilterConfig::for_regime(Regime::Blpf3DWithMip), FilterConfig::for_regime(Regime::ObblFull)};
    const auto results = cli::run_jobs(cfg, false);
    std::map<Regime, std::pair<double, int>> acc;
    bool all_ok = true;
    for (const auto& r : results) {
        if (!r.ok || !r.report) {
            all_ok = false;
            continue;
        }
        auto& a = acc[cfg.regimes[r.job.regime].regime];
        a.first += r.report->psnr;
        a.second += 1;
    }
    auto mean = [&](Regime r) { return acc[r].second ? acc[r].first / acc[r].second : std::nan(""); };
    const double full = mean(Regime::ObblFull), blpf = mean(Regime::Blpf3DWithMip), mip = mean(Regime::Mip2D),
                 van = mean(Regime::VanillaDilation);
    const bool pass = all_ok && full > blpf && full > mip && blpf > van && mip > van && full - van >= 3.0;
    report(6, pass, "ablation ordering on the synthetic suite",
           fmt("mean PSNR obbl %.3f > {blpf3d_mip %.3f, mip %.3f} > vanilla %.3f", full, blpf, mip, van) +
               fmt("; obbl - vanilla = %.3f dB (>= 3)", full - van));
}

void criterion_ob_compensation() {
    core::Gaussian3D g;
    g.center = {0.05, -0.03, 3.0};
    g.scale = {0.2, 0.1, 0.15};
    g.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(0.4, Eigen::Vector3d(1, 2, 3).normalized()));
    g.opacity = 1.0;
    const Eigen::Vector3d rgb(0.8, 0.3, 0.1);
    g.color = core::ShColor::from_rgb(rgb);
    const auto cam = pixel_camera(64, 64);
    raster::RenderSettings rs;
    rs.background = {1, 1, 1};
    const std::vector<core::Gaussian3D> scene{g};
    const std::vector<core::Camera> ctx{cam};
    const auto fb = raster::render(scene, cam, ctx, FilterConfig::for_regime(Regime::ObblFull), rs);
    const auto center = cam.project_point(cam.to_camera(g.center));
    const int cx = static_cast<int>(center.x()), cy = static_cast<int>(center.y());
    double worst_center = 0.0, worst_covered = 0.0;
    for (int c = 0; c < 3; ++c) worst_center = std::max(worst_center, std::abs(fb.color.at(cx, cy, c) - rgb[c]));
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            if (fb.alpha.at(x, y) >= 0.001f)
                for (int c = 0; c < 3; ++c)
                    worst_covered = std::max(worst_covered, std::abs(fb.color.at(x, y, c) - rgb[c]));
    report(7, worst_center <= 1e-3 && worst_covered <= 1e-3, "opacity balancing restores an opaque splat",
           fmt("center |diff| %.3g, covered-pixel max |diff| %.3g (tol 1e-3); raw center alpha %.3f", worst_center,
               worst_covered, fb.alpha.at(cx, cy)));
}

void criterion_hrrc() {
    testkit::Gen gen(5);
    Image a(48, 40, 3), b(48, 40, 3);
    for (auto& v : a.data()) v = static_cast<float>(gen.uniform(0, 1));
    for (auto& v : b.data()) v = static_cast<float>(gen.uniform(0, 1));
    const auto h = metrics::hrrc(a, b, 1);
    const bool bitwise = h.psnr == metrics::capped(metrics::psnr(a, b)) && h.ssim == metrics::ssim(a, b);

    // Ramp 0..1 across a 32x32 image, 4x upsampled; compared where the
    // 4-tap kernel stays inside the image.
    const int n = 32;
    double worst = 0.0;
    for (int k : {2, 4}) {
        Image ramp(n, n, 3);
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                for (int c = 0; c < 3; ++c) ramp.at(x, y, c) = static_cast<float>((0.6 * x + 0.4 * y) / (n - 1));
        const Image up = metrics::bicubic_upsample(ramp, k);
        for (int y = 0; y < n * k; ++y)
            for (int x = 0; x < n * k; ++x) {
                const double sx = (x + 0.5) / k - 0.5, sy = (y + 0.5) / k - 0.5;
                if (sx < 1 || sy < 1 || sx > n - 2 || sy > n - 2) continue;
                worst = std::max(worst, std::abs(up.at(x, y, 1) - (0.6 * sx + 0.4 * sy) / (n - 1)));
            }
    }
    report(8, bitwise && worst <= 1e-3, "HRRC self-test",
           std::string(bitwise ? "factor-1 hrrc bit-identical to PSNR/SSIM" : "factor-1 hrrc differs from PSNR/SSIM") +
               fmt("; bicubic ramp max |diff| %.3g (tol 1e-3, interior)", worst));
}

bool same_tree(const fs::path& a, const fs::path& b, int& files) {
    auto slurp = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };
    bool same = true;
    for (const auto& e : fs::directory_iterator(a)) {
        if (e.path().extension() != ".aasp" && e.path().extension() != ".json") continue;
        ++files;
        const fs::path other = b / e.path().filename();
        same = same && fs::exists(other) && slurp(e.path()) == slurp(other);
    }
    return same;
}

void criterion_determinism() {
    const fs::path dir = scratch("determinism");
    std::ofstream(dir / "run.yaml") << R"(regimes: [vanilla, mip, obbl]
factors: ["1/2", 1, 2]
seed: 7
settings: {background: 0.5}
scenes:
  - name: checker
    kind: checker_plane
    depth_jitter: 0.02
    context_cameras:
      - {eye: [0, 0, 0], target: [0, 0, 1], up: [0, -1, 0], width: 64, height: 64, focal: 64}
      - {eye: [0.4, 0, 0], target: [0, 0, 4], up: [0, -1, 0], width: 64, height: 64, focal: 64}
  - name: box
    kind: textured_box
    box_size: [1, 1, 1]
    context_cameras:
      - {eye: [0, 0, 0], target: [0, 0, 1], up: [0, -1, 0], width: 64, height: 64, focal: 64}
)";
    std::vector<int> codes;
    for (const auto& [name, jobs] : {std::pair{"a", "1"}, std::pair{"b", "3"}, std::pair{"c", "3"}}) {
        std::vector<std::string> args{"aasplat", "render", "--config", (dir / "run.yaml").string(),
                                      "--out", (dir / name).string(), "--jobs", jobs};
        std::vector<char*> argv;
        for (auto& s : args) argv.push_back(s.data());
        codes.push_back(cli::main(static_cast<int>(argv.size()), argv.data()));
    }
    int files_ab = 0, files_bc = 0;
    const bool ab = same_tree(dir / "a", dir / "b", files_ab);
    const bool bc = same_tree(dir / "b", dir / "c", files_bc);
    const bool ok = std::all_of(codes.begin(), codes.end(), [](int c) { return c == 0; });
    report(9, ok && ab && bc && files_ab == 54, "CLI determinism",
           std::to_string(files_ab) + " float/JSON outputs; jobs=1 vs jobs=3 " + (ab ? "identical" : "DIFFERENT") +
               ", repeated jobs=3 " + (bc ? "identical" : "DIFFERENT"));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{criterion_oracle_equivalence, criterion_mip_mass,
                                                      criterion_blpf_floor,         criterion_erosion,
                                                      criterion_brightening,        criterion_ablation,
                                                      criterion_ob_compensation,    criterion_hrrc,
                                                      criterion_determinism};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), false, "criterion raised", e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", g_failed, criteria.size());
    return g_failed == 0 ? 0 : 1;
}
