#include "aasplat/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aasplat/parallel.hpp"
#include "aasplat/raster/image_io.hpp"
#include "aasplat/scene/scene.hpp"

namespace aasplat::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct PreparedScene {
    std::vector<core::Gaussian3D> gaussians;
    std::vector<core::Camera> context;
    std::shared_ptr<const scene::GroundTruth> gt;
    std::vector<Image> references;  // 1x, per target camera (PLY scenes)
    std::string error;
};

PreparedScene prepare(const SceneEntry& entry, std::uint64_t seed) {
    PreparedScene p;
    try {
        if (entry.ply) {
            p.gaussians = scene::load_ply(entry.ply->string());
            p.context = entry.context_cameras;
            for (const auto& r : entry.references) {
                Image ref = raster::read_float_image(r);
                if (ref.channels() == 4) {
                    Image rgb(ref.width(), ref.height(), 3);
                    for (int y = 0; y < ref.height(); ++y)
                        for (int x = 0; x < ref.width(); ++x)
                            for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = ref.at(x, y, c);
                    ref = std::move(rgb);
                }
                p.references.push_back(std::move(ref));
            }
        } else {
            scene::SceneSpec spec = *entry.spec;
            spec.seed = seed;
            auto s = scene::synthesize(spec);
            p.gaussians = std::move(s.gaussians);
            p.context = std::move(s.context_cameras);
            p.gt = std::move(s.ground_truth);
        }
    } catch (const std::exception& e) {
        p.error = e.what();
    }
    return p;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json report_json(const metrics::MetricsReport& r) {
    return {{"psnr", number(r.psnr)},
            {"ssim", number(r.ssim)},
            {"hole_fraction", number(r.hole_fraction)},
            {"brightening_ratio", number(r.brightening_ratio)},
            {"resolution_factor", r.resolution_factor},
            {"covered_alpha_min", number(r.covered_alpha_min)},
            {"covered_alpha_mean", number(r.covered_alpha_mean)}};
}

json stats_json(const raster::RenderStats& s) {
    return {{"input", s.input},
            {"culled_near", s.culled_near},
            {"culled_opacity", s.culled_opacity},
            {"degenerate_skipped", s.degenerate_skipped},
            {"tile_refs", s.tile_refs}};
}

void write_text(const fs::path& path, const std::string& text) {
    raster::write_atomically(path, [&](const fs::path& tmp) {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        os << text;
        if (!os) throw IoError("cannot write " + tmp.string());
    });
}

// Five-stop blue-to-yellow ramp for scalar maps in [0,1].
Image heatmap(const Image& scalar) {
    static const float stops[5][3] = {
        {0.00f, 0.00f, 0.20f}, {0.30f, 0.05f, 0.55f}, {0.80f, 0.20f, 0.35f}, {0.98f, 0.55f, 0.10f}, {1.00f, 1.00f, 0.60f}};
    Image out(scalar.width(), scalar.height(), 3);
    for (int y = 0; y < scalar.height(); ++y) {
        for (int x = 0; x < scalar.width(); ++x) {
            const float v = std::clamp(scalar.at(x, y), 0.0f, 1.0f) * 4.0f;
            const int i = std::min(3, static_cast<int>(v));
            const float t = v - i;
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = stops[i][c] + t * (stops[i + 1][c] - stops[i][c]);
        }
    }
    return out;
}

// Reference image and coverage at the render resolution, plus the protocol used.
struct Reference {
    Image color;
    Image coverage;  // empty when unknown
    std::string protocol = "none";
    int hrrc_factor = 0;  // > 0: color is the 1x reference, compare via hrrc
};

Reference reference_for(const RunConfig& cfg, const PreparedScene& ps, const SceneEntry& entry, std::size_t cam_index,
                        core::Factor factor, const core::Camera& cam) {
    Reference ref;
    const core::Camera& target = entry.target_cameras[cam_index];
    const bool want_hrrc = factor.is_upsample() && cfg.gt_protocol == GtProtocol::Hrrc;
    if (ps.gt && ps.gt->analytic() && !want_hrrc) {
        auto g = ps.gt->render(cam);
        ref.color = std::move(g.color);
        ref.coverage = std::move(g.coverage);
        ref.protocol = "analytic";
        return ref;
    }
    // Everything else derives from a 1x reference.
    Image base;
    Image base_cov;
    if (ps.gt) {
        try {
            auto g = ps.gt->render(target);
            base = std::move(g.color);
            base_cov = std::move(g.coverage);
        } catch (const InvalidArgument&) {
            return ref;
        }
    } else if (cam_index < ps.references.size()) {
        base = ps.references[cam_index];
    } else {
        return ref;
    }
    if (factor.is_identity()) {
        ref.color = std::move(base);
        ref.coverage = std::move(base_cov);
        ref.protocol = ps.gt ? (ps.gt->analytic() ? "analytic" : "reference") : "reference";
    } else if (factor.is_downsample()) {
        ref.color = metrics::resample(base, factor);
        if (!base_cov.empty()) ref.coverage = metrics::resample(base_cov, factor);
        ref.protocol = "box";
    } else {
        ref.color = std::move(base);
        if (!base_cov.empty()) ref.coverage = metrics::resample(base_cov, factor);
        ref.protocol = "hrrc";
        ref.hrrc_factor = factor.ratio();
    }
    return ref;
}

}  // namespace

std::string job_stem(const RunConfig& config, const Job& job) {
    const SceneEntry& s = config.scenes[job.scene];
    std::string stem = s.name + "_" + std::string(filters::regime_name(config.regimes[job.regime].regime)) + "_" +
                       config.factors[job.factor].label();
    if (s.target_cameras.size() > 1) stem += "_cam" + std::to_string(job.camera);
    return stem;
}

std::vector<JobResult> run_jobs(const RunConfig& cfg, bool write_images, bool diagnostics) {
    cfg.validate();
    fs::create_directories(cfg.output);

    std::vector<PreparedScene> scenes;
    for (std::size_t i = 0; i < cfg.scenes.size(); ++i) scenes.push_back(prepare(cfg.scenes[i], cfg.seed + i));

    std::vector<Job> jobs;
    for (std::size_t s = 0; s < cfg.scenes.size(); ++s)
        for (std::size_t r = 0; r < cfg.regimes.size(); ++r)
            for (std::size_t f = 0; f < cfg.factors.size(); ++f)
                for (std::size_t c = 0; c < cfg.scenes[s].target_cameras.size(); ++c) jobs.push_back({s, r, f, c});

    std::vector<JobResult> results(jobs.size());
    int workers = cfg.jobs;
    if (const char* cap = std::getenv("AASPLAT_THREADS")) {
        const int n = std::atoi(cap);
        if (n > 0) workers = std::min(workers, n);
    }

    parallel_for(jobs.size(), workers, [&](std::size_t i) {
        const Job& job = jobs[i];
        JobResult& res = results[i];
        res.job = job;
        res.stem = job_stem(cfg, job);
        const SceneEntry& entry = cfg.scenes[job.scene];
        const PreparedScene& ps = scenes[job.scene];
        try {
            if (!ps.error.empty()) throw Error("scene '" + entry.name + "': " + ps.error);
            const core::Factor factor = cfg.factors[job.factor];
            const core::Camera cam = entry.target_cameras[job.camera].scaled(factor);
            const auto& fc = cfg.regimes[job.regime];
            raster::Framebuffer fb = raster::render(ps.gaussians, cam, ps.context, fc, cfg.settings, &res.stats);

            const Reference ref = reference_for(cfg, ps, entry, job.camera, factor, cam);
            res.gt_protocol = ref.protocol;
            Image compare = ref.color;
            if (ref.hrrc_factor > 0) {
                res.report = metrics::hrrc(fb.color, ref.color, ref.hrrc_factor);
                compare = metrics::bicubic_upsample(ref.color, ref.hrrc_factor);
            } else if (!ref.color.empty()) {
                res.report = metrics::evaluate(fb.color, ref.color, factor.value());
            }
            if (res.report && !ref.coverage.empty()) {
                const auto cs = metrics::coverage_stats(fb.coverage, ref.coverage);
                res.report->hole_fraction = cs.hole_fraction;
                res.report->covered_alpha_min = cs.min;
                res.report->covered_alpha_mean = cs.mean;
            }

            json j = {{"scene", entry.name},
                      {"regime", filters::regime_name(fc.regime)},
                      {"factor", factor.label()},
                      {"camera", job.camera},
                      {"width", cam.width},
                      {"height", cam.height},
                      {"gt_protocol", res.gt_protocol},
                      {"metrics", res.report ? report_json(*res.report) : json(nullptr)},
                      {"stats", stats_json(res.stats)}};

            const fs::path base = cfg.output / res.stem;
            if (write_images) {
                raster::write_atomically(fs::path(base.string() + ".png"),
                                         [&](const fs::path& t) { raster::write_png(t, fb.color); });
                raster::write_atomically(fs::path(base.string() + ".aasp"),
                                         [&](const fs::path& t) { raster::write_float_image(t, fb.rgba()); });
            }
            if (diagnostics) {
                const auto& a = fb.alpha.data();
                const auto& cv = fb.coverage.data();
                j["alpha_min"] = a.empty() ? 0.0 : *std::min_element(a.begin(), a.end());
                j["coverage_min"] = cv.empty() ? 0.0 : *std::min_element(cv.begin(), cv.end());
                raster::write_atomically(fs::path(base.string() + "_alpha.png"),
                                         [&](const fs::path& t) { raster::write_png(t, heatmap(fb.coverage)); });
                raster::write_atomically(fs::path(base.string() + "_alpha.aasp"),
                                         [&](const fs::path& t) { raster::write_float_image(t, fb.coverage); });
                if (!compare.empty()) {
                    Image diff(fb.width(), fb.height(), 3);
                    for (std::size_t k = 0; k < diff.data().size(); ++k) {
                        diff.data()[k] = std::abs(fb.color.data()[k] - compare.data()[k]);
                    }
                    raster::write_atomically(fs::path(base.string() + "_absdiff.png"),
                                             [&](const fs::path& t) { raster::write_png(t, diff); });
                }
            }
            write_text(fs::path(base.string() + (diagnostics ? "_diag.json" : ".json")), j.dump(2) + "\n");
            res.ok = true;
        } catch (const std::exception& e) {
            res.ok = false;
            res.error = e.what();
        }
    });

    for (const auto& r : results) {
        if (r.ok) {
            std::fprintf(stderr, "ok    %s", r.stem.c_str());
            if (r.report) std::fprintf(stderr, "  psnr %.3f  ssim %.4f  (%s)", r.report->psnr, r.report->ssim, r.gt_protocol.c_str());
            std::fprintf(stderr, "\n");
        } else {
            std::fprintf(stderr, "FAIL  %s: %s\n", r.stem.c_str(), r.error.c_str());
        }
    }
    return results;
}

namespace {

int exit_status(const std::vector<JobResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const JobResult& r) { return r.ok; }) ? kExitOk
                                                                                                : kExitPartial;
}

std::string fmt(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

int cmd_render(const RunConfig& config) { return exit_status(run_jobs(config, true)); }

int cmd_diag(const RunConfig& config) {
    const auto results = run_jobs(config, false, true);
    // Per-regime totals of the rasterizer counters.
    json summary = json::object();
    for (const auto& r : results) {
        const std::string name(filters::regime_name(config.regimes[r.job.regime].regime));
        json& s = summary[name];
        if (s.is_null()) s = {{"degenerate_skipped", 0}, {"culled_opacity", 0}, {"culled_near", 0}, {"jobs", 0}};
        s["degenerate_skipped"] = s["degenerate_skipped"].get<std::size_t>() + r.stats.degenerate_skipped;
        s["culled_opacity"] = s["culled_opacity"].get<std::size_t>() + r.stats.culled_opacity;
        s["culled_near"] = s["culled_near"].get<std::size_t>() + r.stats.culled_near;
        s["jobs"] = s["jobs"].get<int>() + 1;
    }
    write_text(config.output / "diag_summary.json", summary.dump(2) + "\n");
    return exit_status(results);
}

int cmd_sweep(const RunConfig& config) {
    if (config.regimes.size() < 2) throw ConfigError("sweep needs at least two regimes");
    const auto results = run_jobs(config, false);
    const std::size_t nf = config.factors.size();

    // (scene, regime) -> per-factor sums over target cameras.
    struct Row {
        std::vector<double> psnr, ssim;
        std::vector<int> count;
    };
    std::map<std::pair<std::size_t, std::size_t>, Row> rows;
    for (std::size_t s = 0; s < config.scenes.size(); ++s)
        for (std::size_t r = 0; r < config.regimes.size(); ++r)
            rows[{s, r}] = {std::vector<double>(nf, 0.0), std::vector<double>(nf, 0.0), std::vector<int>(nf, 0)};
    std::vector<bool> missing(config.scenes.size() * config.regimes.size() * nf, false);
    for (const auto& res : results) {
        const std::size_t key = (res.job.scene * config.regimes.size() + res.job.regime) * nf + res.job.factor;
        if (!res.ok || !res.report) {
            missing[key] = true;
            continue;
        }
        Row& row = rows[{res.job.scene, res.job.regime}];
        row.psnr[res.job.factor] += res.report->psnr;
        row.ssim[res.job.factor] += res.report->ssim;
        row.count[res.job.factor] += 1;
    }

    std::vector<std::string> header{"scene", "regime"};
    for (const char* m : {"psnr", "ssim"}) {
        for (const auto& f : config.factors) header.push_back(std::string(m) + "_" + f.label());
        header.push_back(std::string(m) + "_avg");
    }
    std::vector<std::vector<double>> values;
    std::vector<std::pair<std::string, std::string>> labels;
    for (auto& [key, row] : rows) {
        std::vector<double> v;
        for (const auto* col : {&row.psnr, &row.ssim}) {
            double sum = 0.0;
            bool complete = true;
            for (std::size_t f = 0; f < nf; ++f) {
                const std::size_t k = (key.first * config.regimes.size() + key.second) * nf + f;
                const double x = (missing[k] || row.count[f] == 0) ? std::nan("") : (*col)[f] / row.count[f];
                complete = complete && std::isfinite(x);
                v.push_back(x);
                sum += x;
            }
            v.push_back(complete ? sum / static_cast<double>(nf) : std::nan(""));
        }
        values.push_back(std::move(v));
        labels.emplace_back(config.scenes[key.first].name, std::string(filters::regime_name(config.regimes[key.second].regime)));
    }

    std::ostringstream csv;
    for (std::size_t i = 0; i < header.size(); ++i) csv << (i ? "," : "") << header[i];
    csv << "\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        csv << labels[i].first << "," << labels[i].second;
        for (double v : values[i]) csv << "," << fmt(v);
        csv << "\n";
    }
    write_text(config.output / "sweep.csv", csv.str());

    // Markdown: one table per scene, best value per column in bold.
    std::ostringstream md;
    for (std::size_t s = 0; s < config.scenes.size(); ++s) {
        md << "## " << config.scenes[s].name << "\n\n|";
        for (std::size_t i = 1; i < header.size(); ++i) md << " " << header[i] << " |";
        md << "\n|";
        for (std::size_t i = 1; i < header.size(); ++i) md << (i == 1 ? "---|" : "---:|");
        md << "\n";
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i].first == config.scenes[s].name) idx.push_back(i);
        const std::size_t ncols = values.empty() ? 0 : values[0].size();
        std::vector<double> best(ncols, -std::numeric_limits<double>::infinity());
        for (std::size_t i : idx)
            for (std::size_t c = 0; c < ncols; ++c)
                if (std::isfinite(values[i][c])) best[c] = std::max(best[c], values[i][c]);
        for (std::size_t i : idx) {
            md << "| " << labels[i].second << " |";
            for (std::size_t c = 0; c < ncols; ++c) {
                char buf[32];
                const bool psnr_col = c < ncols / 2;
                std::snprintf(buf, sizeof buf, psnr_col ? "%.3f" : "%.4f", values[i][c]);
                const bool is_best = std::isfinite(values[i][c]) && values[i][c] == best[c];
                md << " " << (is_best ? "**" + std::string(buf) + "**" : std::string(buf)) << " |";
            }
            md << "\n";
        }
        md << "\n";
    }
    write_text(config.output / "sweep.md", md.str());
    return exit_status(results);
}

int main(int argc, char** argv) {
    CLI::App app{"aasplat: anti-aliased Gaussian splatting renderer and multi-scale harness"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> regimes;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Run configuration (YAML)")->required();
        sub->add_option("--out", out_dir, "Output directory (overrides the config)");
        sub->add_option("--jobs", jobs, "Parallel jobs")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Seed for randomized scene variants");
        sub->add_option("--regime", regimes, "Regime to run; repeatable, replaces the config list");
    };
    CLI::App* render = app.add_subcommand("render", "Render every (scene, regime, factor, camera) job");
    CLI::App* sweep = app.add_subcommand("sweep", "Render and aggregate PSNR/SSIM tables");
    CLI::App* diag = app.add_subcommand("diag", "Alpha heatmaps, error maps and rasterizer counters");
    for (auto* s : {render, sweep, diag}) add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.output = out_dir;
        if (jobs > 0) cfg.jobs = jobs;
        if (app.got_subcommand(render) ? render->count("--seed") : app.got_subcommand(sweep) ? sweep->count("--seed") : diag->count("--seed")) {
            cfg.seed = seed;
        }
        if (!regimes.empty()) {
            std::vector<filters::FilterConfig> selected;
            for (const auto& name : regimes) {
                const auto r = filters::parse_regime(name);
                auto it = std::find_if(cfg.regimes.begin(), cfg.regimes.end(),
                                       [&](const filters::FilterConfig& c) { return c.regime == r; });
                selected.push_back(it != cfg.regimes.end() ? *it : filters::FilterConfig::for_regime(r));
            }
            cfg.regimes = std::move(selected);
        }
        cfg.validate();
        if (app.got_subcommand(sweep) && cfg.regimes.size() < 2) throw ConfigError("sweep needs at least two regimes");
    } catch (const Error& e) {
        std::fprintf(stderr, "config error: %s: %s\n", config_path.c_str(), e.what());
        return kExitConfig;
    }

    try {
        if (app.got_subcommand(render)) return cmd_render(cfg);
        if (app.got_subcommand(sweep)) return cmd_sweep(cfg);
        return cmd_diag(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitPartial;
    }
}

}  // namespace aasplat::cli
