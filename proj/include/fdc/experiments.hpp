#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "fdc/config.hpp"

namespace fdc {

inline constexpr const char* kToolVersion = "0.1.0";

// Result of one experiment run, before any file is written.  `report` holds
// only deterministic quantities (bit-identical across reruns of the same
// config and seed); timings live in meta.json.
struct RunArtifacts {
  nlohmann::json report;
  std::vector<std::string> trace_columns;
  std::vector<std::vector<double>> trace_rows;
  bool success = true;
  double wall_seconds = 0;
};

std::vector<std::string> list_experiments();

// Dispatch on cfg.experiment and run it in memory.
RunArtifacts run_experiment(const ExperimentConfig& cfg);

// Run and write report.json, trace.csv and meta.json under cfg.out_dir.
// Returns the process exit code: 0 on success, 1 if the experiment did not
// meet its convergence demand and the config requires convergence.
int run(const ExperimentConfig& cfg);

}  // namespace fdc
