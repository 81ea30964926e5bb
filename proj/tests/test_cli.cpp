#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fdc/errors.hpp"
#include "fdc/experiments.hpp"

using fdc::ConfigError;
using fdc::ExperimentConfig;
using fdc::parse_config_text;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path fresh_dir(const char* leaf) {
  const auto dir = std::filesystem::temp_directory_path() / "fdc_cli_tests" / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing: full document round trip") {
  const ExperimentConfig cfg = parse_config_text(R"(
# full example exercising every key
experiment = gauge

[domain]
dim = 2
topology = box
nodes_per_axis = 6
length = 2.5

[params]
s = 0.3
p = 3.0
q = 1.5
N = 4
trials = 9
seed = 1234
tol = 1e-7          # inline comment
max_iters = 500
lambda = 6.0
perturb = 0.05
amplitude = 0.25
manufactured = true
init = band
require_convergence = false

[output]
dir = some/dir
threads = 3
)");
  CHECK(cfg.experiment == "gauge");
  CHECK(cfg.dim == 2);
  CHECK(cfg.topology == fdc::Topology::Box);
  CHECK(cfg.nodes_per_axis == 6);
  CHECK(cfg.length == 2.5);
  CHECK(cfg.s == 0.3);
  CHECK(cfg.p == 3.0);
  CHECK(cfg.q == 1.5);
  CHECK(cfg.target_dim == 4);
  CHECK(cfg.trials == 9);
  CHECK(cfg.seed == 1234);
  CHECK(cfg.tol == 1e-7);
  CHECK(cfg.max_iters == 500);
  CHECK(cfg.lambda == 6.0);
  CHECK(cfg.perturb == 0.05);
  CHECK(cfg.amplitude == 0.25);
  CHECK(cfg.manufactured == true);
  CHECK(cfg.init == "band");
  CHECK(cfg.require_convergence == false);
  CHECK(cfg.out_dir == "some/dir");
  CHECK(cfg.threads == 3);
  CHECK(cfg.raw.at("params.tol") == "1e-7");
  CHECK(cfg.raw.at("domain.topology") == "box");

  const auto dom = cfg.make_domain();
  CHECK(dom->dim() == 2);
  CHECK(dom->size() == 36);
  CHECK(dom->length() == 2.5);
}

TEST_CASE("config parsing: minimal document keeps the defaults") {
  const ExperimentConfig cfg = parse_config_text("experiment = ops-check\n");
  CHECK(cfg.dim == 1);
  CHECK(cfg.topology == fdc::Topology::Torus);
  CHECK(cfg.nodes_per_axis == 64);
  CHECK(cfg.length == 1.0);
  CHECK(cfg.s == 0.5);
  CHECK(cfg.p == 2.0);
  CHECK(cfg.target_dim == 2);
  CHECK(cfg.seed == 42);
  CHECK(cfg.tol == 1e-8);
  CHECK(cfg.lambda == 4.0);
  CHECK(cfg.manufactured == false);
  CHECK(cfg.init == "equator");
  CHECK(cfg.require_convergence == true);
  CHECK(cfg.out_dir == "out");
  CHECK(cfg.threads == 1);
}

TEST_CASE("config parsing: malformed documents are rejected with reasons") {
  auto rejects = [](const std::string& text) {
    CHECK_THROWS_AS(parse_config_text(text), ConfigError);
  };
  rejects("");                                          // missing experiment
  rejects("[params]\ns = 0.5\n");                       // missing experiment
  rejects("experiment = ops-check\nbogus = 1\n");       // unknown top-level key
  rejects("experiment = ops-check\n[nope]\n");          // unknown section
  rejects("experiment = ops-check\n[params\ns = 1\n");  // malformed header
  rejects("experiment = ops-check\n[params]\ns\n");     // missing '='
  rejects("experiment = ops-check\n[params]\ns =\n");   // empty value
  rejects("experiment = ops-check\n[params]\ns = abc\n");
  rejects("experiment = ops-check\n[params]\ntrials = 2.5\n");
  rejects("experiment = ops-check\n[params]\nmanufactured = maybe\n");
  rejects("experiment = ops-check\n[params]\ninit = sideways\n");
  rejects("experiment = ops-check\n[params]\ns = 0.5\ns = 0.6\n");  // duplicate
  rejects("experiment = ops-check\n[domain]\ndim = 3\n");
  rejects("experiment = ops-check\n[domain]\nnodes_per_axis = 3\n");
  rejects("experiment = ops-check\n[domain]\nlength = 0\n");
  rejects("experiment = ops-check\n[domain]\ntopology = sphere\n");
  rejects("experiment = ops-check\n[params]\ntrials = 0\n");
  rejects("experiment = ops-check\n[params]\nN = 1\n");
  rejects("experiment = ops-check\n[output]\nthreads = 0\n");
  // Section-qualified keys do not leak across sections.
  rejects("experiment = ops-check\n[output]\ns = 0.5\n");
  CHECK_THROWS_AS(fdc::parse_config_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("the experiment registry lists every dispatchable name") {
  const auto names = fdc::list_experiments();
  REQUIRE(names.size() == 7);
  CHECK(names[0] == "ops-check");
  CHECK(names[1] == "halfharmonic");
  CHECK(names[2] == "wsp-sphere");
  CHECK(names[3] == "gauge");
  CHECK(names[4] == "divcurl");
  CHECK(names[5] == "wente");
  CHECK(names[6] == "tangency");

  ExperimentConfig cfg = parse_config_text("experiment = mystery\n");
  CHECK_THROWS_AS(fdc::run_experiment(cfg), ConfigError);
}

TEST_CASE("every experiment runs in memory on a desk-scale config") {
  auto tiny = [](const std::string& body) {
    return parse_config_text(body +
                             "\n[domain]\nnodes_per_axis = 8\n"
                             "[params]\ntrials = 3\n");
  };

  SUBCASE("ops-check") {
    const auto art = fdc::run_experiment(tiny("experiment = ops-check"));
    CHECK(art.success);
    CHECK(art.report.at("all_within_tolerance").get<bool>());
    CHECK(art.report.at("adjointness_max_rel").get<double>() <= 1e-10);
    CHECK(art.report.at("composition_max_rel").get<double>() <= 1e-12);
    CHECK(art.trace_rows.size() == 3);
    CHECK(art.trace_columns.size() == 5);
  }

  SUBCASE("halfharmonic descends a perturbed loop") {
    ExperimentConfig cfg = parse_config_text(
        "experiment = halfharmonic\n[domain]\nnodes_per_axis = 8\n"
        "[params]\nN = 2\nperturb = 0.1\ntol = 1e-8\n");
    const auto art = fdc::run_experiment(cfg);
    CHECK(art.success);
    CHECK(art.report.at("converged").get<bool>());
    CHECK(art.report.at("el_residual").get<double>() <= 1e-8);
    CHECK(art.report.at("final_energy").get<double>() <=
          art.report.at("initial_energy").get<double>());
    CHECK(art.report.at("sphere_conservation_scale").get<double>() > 0.0);
    // trace: header row count equals recorded iterations + 1.
    CHECK(art.trace_rows.size() ==
          static_cast<size_t>(art.report.at("iterations").get<int>()) + 1);
  }

  SUBCASE("wsp-sphere accepts the planar critical start") {
    ExperimentConfig cfg = parse_config_text(
        "experiment = wsp-sphere\n[domain]\ndim = 2\nnodes_per_axis = 4\n"
        "[params]\nN = 3\np = 4\n");
    const auto art = fdc::run_experiment(cfg);
    CHECK(art.success);
    CHECK(art.report.at("converged").get<bool>());
    CHECK(art.report.at("p").get<double>() == 4.0);
  }

  SUBCASE("gauge, random and manufactured") {
    ExperimentConfig cfg = parse_config_text(
        "experiment = gauge\n[domain]\nnodes_per_axis = 8\n"
        "[params]\nN = 3\namplitude = 0.4\ntol = 1e-8\n");
    const auto art = fdc::run_experiment(cfg);
    CHECK(art.success);
    CHECK(art.report.at("converged").get<bool>());
    CHECK(art.report.at("energy_decreased").get<bool>());
    CHECK(art.report.at("gauged_antisymmetry_defect").get<double>() <= 1e-10);
    CHECK(art.report.at("formula_consistency").get<double>() <= 1e-12);

    ExperimentConfig mcfg = parse_config_text(
        "experiment = gauge\n[domain]\nnodes_per_axis = 8\n"
        "[params]\nN = 3\namplitude = 3e-4\nmanufactured = true\ntol = 1e-10\n");
    const auto mart = fdc::run_experiment(mcfg);
    CHECK(mart.success);
    CHECK(mart.report.at("final_energy").get<double>() <= 1e-10);
  }

  SUBCASE("divcurl") {
    const auto art = fdc::run_experiment(tiny("experiment = divcurl"));
    CHECK(art.success);
    CHECK(art.report.at("max_ratio").get<double>() > 0.0);
    CHECK(art.report.at("const_phi_max_rel_pairing").get<double>() <= 1e-10);
    CHECK(art.trace_rows.size() == 3);
  }

  SUBCASE("wente") {
    const auto art = fdc::run_experiment(tiny("experiment = wente"));
    CHECK(art.success);
    CHECK(art.report.at("max_ratio").get<double>() > 0.0);
  }

  SUBCASE("tangency") {
    ExperimentConfig cfg = parse_config_text(
        "experiment = tangency\n[domain]\nnodes_per_axis = 8\n"
        "[params]\ntrials = 3\nN = 3\ntol = 1e-10\n");
    const auto art = fdc::run_experiment(cfg);
    CHECK(art.success);
    CHECK(art.report.at("max_abs_deviation_from_half").get<double>() <= 1e-10);
    CHECK(art.trace_rows.size() == 4);  // trials + structured map
  }
}

TEST_CASE("artifact writing: files, exit codes, reproducibility") {
  const auto dir = fresh_dir("artifacts");
  ExperimentConfig cfg = parse_config_text(
      "experiment = ops-check\n[domain]\nnodes_per_axis = 8\n"
      "[params]\ntrials = 2\n[output]\ndir = " + (dir / "a").string() + "\n");
  REQUIRE(fdc::run(cfg) == 0);

  for (const char* name : {"report.json", "trace.csv", "meta.json"})
    CHECK(std::filesystem::exists(dir / "a" / name));

  const auto report = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
  CHECK(report.at("experiment") == "ops-check");
  CHECK(report.at("seed").get<std::uint64_t>() == 42);

  const auto meta = nlohmann::json::parse(slurp(dir / "a" / "meta.json"));
  CHECK(meta.at("version") == fdc::kToolVersion);
  CHECK(meta.at("success").get<bool>());
  CHECK(meta.at("config").at("domain.nodes_per_axis") == "8");

  std::istringstream trace(slurp(dir / "a" / "trace.csv"));
  std::string header;
  std::getline(trace, header);
  CHECK(header == "trial,adjointness,composition,energy_identity,xspq_collapse");
  int rows = 0;
  for (std::string line; std::getline(trace, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 2);

  // Identical config and seed: byte-identical report.
  cfg.out_dir = (dir / "b").string();
  REQUIRE(fdc::run(cfg) == 0);
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));

  // A different seed changes the drawn fields, hence the measured maxima.
  cfg.seed = 43;
  cfg.out_dir = (dir / "c").string();
  REQUIRE(fdc::run(cfg) == 0);
  CHECK(slurp(dir / "a" / "report.json") != slurp(dir / "c" / "report.json"));
}

TEST_CASE("convergence demands drive the exit code") {
  const auto dir = fresh_dir("exitcodes");
  const std::string base =
      "experiment = halfharmonic\n[domain]\nnodes_per_axis = 8\n"
      "[params]\nN = 2\nperturb = 0.2\ntol = 1e-12\nmax_iters = 2\n";

  ExperimentConfig strict = parse_config_text(base);
  strict.out_dir = (dir / "strict").string();
  CHECK(fdc::run(strict) == 1);
  const auto meta = nlohmann::json::parse(slurp(dir / "strict" / "meta.json"));
  CHECK(meta.at("success").get<bool>() == false);
  // Artifacts are written even for failed runs.
  CHECK(std::filesystem::exists(dir / "strict" / "report.json"));

  ExperimentConfig lax =
      parse_config_text(base + "require_convergence = false\n");
  lax.out_dir = (dir / "lax").string();
  CHECK(fdc::run(lax) == 0);
}
