#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "fdc/domain.hpp"

namespace fdc {

// Flat key-value experiment configuration with [section] grouping.  Keys are
// stored fully qualified ("domain.dim"); unknown keys are rejected so typos
// fail fast.  See docs/config.md for the schema.
struct ExperimentConfig {
  std::string experiment;

  // [domain]
  int dim = 1;
  Topology topology = Topology::Torus;
  int nodes_per_axis = 64;
  double length = 1.0;

  // [params]
  double s = 0.5;
  double p = 2.0;
  double q = 2.0;
  int target_dim = 2;  // sphere ambient / rotation group dimension N
  int trials = 20;
  std::uint64_t seed = 42;
  double tol = 1e-8;
  int max_iters = 200000;
  double lambda = 4.0;     // window factor for localized div-curl norms
  double perturb = 0.0;    // initial-data perturbation amplitude
  double amplitude = 1.0;  // scale of random/manufactured connection forms
  bool manufactured = false;
  std::string init = "equator";  // equator | band | random
  bool require_convergence = true;

  // [output]
  std::string out_dir = "out";
  int threads = 1;

  // Raw parsed keys for the meta.json echo.
  std::map<std::string, std::string> raw;

  DomainPtr make_domain() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace fdc
