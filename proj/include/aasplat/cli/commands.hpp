#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "aasplat/cli/config.hpp"
#include "aasplat/metrics/metrics.hpp"
#include "aasplat/raster/rasterizer.hpp"

namespace aasplat::cli {

enum ExitCode : int { kExitOk = 0, kExitPartial = 1, kExitConfig = 2 };

/// One (scene, regime, factor, target camera) unit of work.
struct Job {
    std::size_t scene = 0;
    std::size_t regime = 0;
    std::size_t factor = 0;
    std::size_t camera = 0;
};

struct JobResult {
    Job job;
    std::string stem;  // output file stem
    bool ok = false;
    std::string error;
    std::string gt_protocol = "none";  // analytic, box, reference, hrrc or none
    std::optional<metrics::MetricsReport> report;
    raster::RenderStats stats;
};

/// Flat deterministic file stem: "{scene}_{regime}_{factor}" plus "_cam{k}"
/// when the scene has several target cameras.
std::string job_stem(const RunConfig& config, const Job& job);

/// Renders every job; writes PNG, RGBA float image and metrics JSON per job
/// when `write_images` is set (JSON only otherwise). Failures are recorded,
/// not thrown.
std::vector<JobResult> run_jobs(const RunConfig& config, bool write_images, bool diagnostics = false);

int cmd_render(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_diag(const RunConfig& config);

/// Entry point for the aasplat executable.
int main(int argc, char** argv);

}  // namespace aasplat::cli
