#pragma once

#include "shapegeo/config.hpp"
#include "shapegeo/diagnostics.hpp"

#include <string>
#include <vector>

namespace shapegeo {

struct ExperimentResult {
  int status = 0;  // 0 = every internal check passed
  std::vector<std::string> messages;
};

/// experiment names: bump, image, spheres, zigzag, frechet-scaling, selfx
bool is_known_experiment(const std::string& name);
std::vector<std::string> experiment_names();

/// Runs the named pipeline end-to-end: experiment-specific defaults, then
/// `overrides` (key=value), then integration / evaluation, artifact export
/// into config.output_dir and the experiment's internal checks.
ExperimentResult run_experiment(const std::string& name, const RunConfig& base,
                                const std::vector<std::string>& overrides = {});

/// The `run` subcommand: integrate the configured IVP, stream OBJ frames
/// through a bounded writer queue, write diagnostics.csv.
void run_pipeline(const RunConfig& config);

/// worker cap from SHAPE_GEODESICS_THREADS (>=1; hardware default)
int worker_threads();

}  // namespace shapegeo
