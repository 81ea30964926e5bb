#include "fdc/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fdc/analysis.hpp"
#include "fdc/gauge.hpp"
#include "fdc/rng.hpp"
#include "fdc/solver.hpp"

namespace fdc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// ---------------------------------------------------------------- ops-check

RunArtifacts ops_check(const ExperimentConfig& cfg) {
  const DomainPtr dom = cfg.make_domain();
  RunArtifacts art;
  art.trace_columns = {"trial", "adjointness", "composition", "energy_identity",
                       "xspq_collapse"};
  double worst_adj = 0, worst_comp = 0, worst_energy = 0, worst_xspq = 0;
  for (int t = 0; t < cfg.trials; ++t) {
    auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(t));
    const OffDiagField f = random_offdiag_field(dom, 1, rng);
    const ScalarField phi = random_scalar_field(dom, rng);
    const ScalarField g = random_scalar_field(dom, rng);

    // <div_s F, phi>_w == <F, d_s phi> in the pair inner product.
    const double lhs =
        s_divergence(f, cfg.s).values.dot(phi.values.cwiseProduct(dom->weights()));
    const double rhs = pairing(f, s_gradient(phi, cfg.s))
                           .values.dot(dom->weights());
    const double adj = rel_diff(lhs, rhs);

    // div_s(d_s g) == 2 (-D)^s g.
    const ScalarField comp_l = s_divergence(s_gradient(g, cfg.s), cfg.s);
    const ScalarField comp_r = fractional_laplacian(g, cfg.s);
    const double comp =
        (comp_l.values - 2 * comp_r.values).array().abs().maxCoeff() /
        std::max(comp_r.values.array().abs().maxCoeff() * 2, 1e-300);

    // sum_i <d_s phi, d_s g>(i) w_i == 2 sum_i ((-D)^s phi)(i) g(i) w_i.
    const double e_l = pairing(s_gradient(phi, cfg.s), s_gradient(g, cfg.s))
                           .values.dot(dom->weights());
    const double e_r = 2 * fractional_laplacian(phi, cfg.s)
                               .values.dot(g.values.cwiseProduct(dom->weights()));
    const double energy_id = rel_diff(e_l, e_r);

    // Mixed seminorm with q == p collapses to the Gagliardo seminorm.
    const double x1 = xspq_seminorm(g, cfg.s, cfg.p, cfg.p);
    const double x2 = gagliardo_seminorm(g, cfg.s, cfg.p);
    const double xspq = rel_diff(x1, x2);

    art.trace_rows.push_back(
        {static_cast<double>(t), adj, comp, energy_id, xspq});
    worst_adj = std::max(worst_adj, adj);
    worst_comp = std::max(worst_comp, comp);
    worst_energy = std::max(worst_energy, energy_id);
    worst_xspq = std::max(worst_xspq, xspq);
  }
  art.report["experiment"] = "ops-check";
  art.report["nodes"] = dom->size();
  art.report["s"] = cfg.s;
  art.report["p"] = cfg.p;
  art.report["trials"] = cfg.trials;
  art.report["adjointness_max_rel"] = worst_adj;
  art.report["composition_max_rel"] = worst_comp;
  art.report["energy_identity_max_rel"] = worst_energy;
  art.report["xspq_collapse_max_rel"] = worst_xspq;
  art.report["tolerance"] = cfg.tol;
  art.success = worst_adj <= cfg.tol && worst_comp <= cfg.tol &&
                worst_energy <= cfg.tol && worst_xspq <= cfg.tol;
  art.report["all_within_tolerance"] = art.success;
  return art;
}

// ------------------------------------------------------------ harmonic maps

SphereMap initial_map(const ExperimentConfig& cfg, const DomainPtr& dom) {
  auto rng = make_rng(cfg.seed, 0x696e6974ULL);  // initial-data stream
  const int n = cfg.target_dim;
  require(n >= 2, "initial map: target dimension must be >= 2");
  if (cfg.init == "random") return project_sphere(random_unit_map(dom, n, rng));

  std::normal_distribution<double> gauss;
  VectorMap u(dom, n);
  for (int i = 0; i < dom->size(); ++i) {
    // Degree-1 angle along the first axis, optionally perturbed.  The
    // perturbation stays inside the (1,2)-plane so the flow keeps evolving
    // in a totally geodesic circle regardless of n.
    double theta = 2 * kPi * dom->nodes()(i, 0) / cfg.length;
    if (cfg.perturb > 0) theta += cfg.perturb * gauss(rng);
    if (cfg.init == "band" && n >= 3) {
      const double x_last = dom->nodes()(i, dom->dim() - 1);
      double psi = kPi / 2 + 0.3 * std::sin(2 * kPi * x_last / cfg.length);
      if (cfg.perturb > 0) psi += cfg.perturb * gauss(rng);
      u.values(i, 0) = std::sin(psi) * std::cos(theta);
      u.values(i, 1) = std::sin(psi) * std::sin(theta);
      u.values(i, 2) = std::cos(psi);
    } else {
      u.values(i, 0) = std::cos(theta);
      u.values(i, 1) = std::sin(theta);
    }
  }
  return project_sphere(u);
}

RunArtifacts harmonic_experiment(const ExperimentConfig& cfg) {
  const DomainPtr dom = cfg.make_domain();
  const SphereMap u0 = initial_map(cfg, dom);

  SolverConfig scfg;
  scfg.tol = cfg.tol;
  scfg.max_iters = cfg.max_iters;
  auto [u, rep] = solve_harmonic_map(u0, cfg.s, cfg.p, scfg);

  const ConservationReport sphere =
      conservation_residual(u, cfg.s, cfg.p, OmegaFamily::Sphere);
  const ConservationReport killing =
      conservation_residual(u, cfg.s, cfg.p, OmegaFamily::Killing);

  RunArtifacts art;
  art.trace_columns = {"iter", "energy", "el_residual", "step"};
  for (size_t k = 0; k < rep.energy_trace.size(); ++k)
    art.trace_rows.push_back({static_cast<double>(k), rep.energy_trace[k],
                              rep.residual_trace[k],
                              k == 0 ? 0.0 : rep.step_trace[k - 1]});
  art.report["experiment"] = cfg.experiment;
  art.report["nodes"] = dom->size();
  art.report["s"] = cfg.s;
  art.report["p"] = cfg.p;
  art.report["N"] = cfg.target_dim;
  art.report["init"] = cfg.init;
  art.report["perturb"] = cfg.perturb;
  art.report["converged"] = rep.converged;
  art.report["iterations"] = rep.iterations;
  art.report["initial_energy"] = rep.initial_energy;
  art.report["final_energy"] = rep.final_energy;
  art.report["el_residual"] = rep.el_residual;
  art.report["sphere_conservation_residual"] = sphere.residual;
  art.report["sphere_conservation_scale"] = sphere.scale;
  art.report["killing_conservation_residual"] = killing.residual;
  art.report["killing_conservation_scale"] = killing.scale;
  art.success = rep.converged;
  art.wall_seconds = rep.wall_seconds;
  return art;
}

// ------------------------------------------------------------------- gauge

MatrixOffDiagField manufactured_connection(const DomainPtr& dom, int n,
                                           double s, double amplitude,
                                           std::uint64_t seed) {
  // Smooth small rotation field P*(x) = exp(amplitude * sum_g c_g
  // sin(2 pi <k_g, x> / L + phase_g) A_g), then the connection that P*
  // gauges to first order: skew(I - P*(x)^T P*(y)) / d^s.
  auto rng = make_rng(seed, 0x6d616e75ULL);  // manufactured-field stream
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> freq(1, 2);
  std::uniform_real_distribution<double> phase(0, 2 * kPi);
  const KillingBasis basis(n);

  struct Wave {
    double c, phase;
    Eigen::VectorXd k;
  };
  std::vector<Wave> waves;
  for (int g = 0; g < basis.count(); ++g) {
    Wave w;
    w.c = gauss(rng);
    w.phase = phase(rng);
    w.k = Eigen::VectorXd(dom->dim());
    for (int d = 0; d < dom->dim(); ++d) w.k[d] = freq(rng);
    waves.push_back(std::move(w));
  }

  std::vector<Eigen::MatrixXd> rots;
  for (int i = 0; i < dom->size(); ++i) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int g = 0; g < basis.count(); ++g) {
      const double arg =
          2 * kPi * waves[g].k.dot(dom->nodes().row(i)) / dom->length() +
          waves[g].phase;
      a += amplitude * waves[g].c * std::sin(arg) * basis.generator(g);
    }
    rots.push_back(so_exponential(a));
  }
  const GaugeField target(dom, std::move(rots));

  MatrixOffDiagField omega(dom, n);
  const Eigen::MatrixXd inv_ds = dom->inv_dist_pow(s);
  for (int i = 0; i < dom->size(); ++i)
    for (int j = 0; j < dom->size(); ++j) {
      if (i == j) continue;
      const Eigen::MatrixXd m =
          Eigen::MatrixXd::Identity(n, n) -
          target.rotations[i].transpose() * target.rotations[j];
      omega.set_pair(i, j, 0.5 * (m - m.transpose()) * inv_ds(i, j));
    }
  return omega;
}

RunArtifacts gauge_experiment(const ExperimentConfig& cfg) {
  const DomainPtr dom = cfg.make_domain();
  const int n = cfg.target_dim;

  MatrixOffDiagField omega(dom, n);
  if (cfg.manufactured) {
    omega = manufactured_connection(dom, n, cfg.s, cfg.amplitude, cfg.seed);
  } else {
    auto rng = make_rng(cfg.seed, 0x636f6e6eULL);  // connection stream
    omega = random_antisym_matrix_field(dom, n, rng);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) omega.entry(r, c) *= cfg.amplitude;
  }

  SolverConfig scfg;
  scfg.tol = cfg.tol;
  scfg.max_iters = cfg.max_iters;
  auto [p, rep] = solve_gauge(omega, cfg.s, scfg);

  const MatrixOffDiagField gauged = omega_p(p, omega, cfg.s);
  const MatrixOffDiagField gauged_gen = omega_p_general(p, omega, cfg.s);
  double formula_diff = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      formula_diff = std::max(formula_diff,
                              (gauged.entry(r, c) - gauged_gen.entry(r, c))
                                  .array().abs().maxCoeff());
  const ConservationReport cons =
      gauge_conservation_residual(p, omega, cfg.s);

  RunArtifacts art;
  art.trace_columns = {"iter", "energy", "grad_norm", "step"};
  for (size_t k = 0; k < rep.energy_trace.size(); ++k)
    art.trace_rows.push_back({static_cast<double>(k), rep.energy_trace[k],
                              rep.residual_trace[k],
                              k == 0 ? 0.0 : rep.step_trace[k - 1]});
  art.report["experiment"] = "gauge";
  art.report["nodes"] = dom->size();
  art.report["s"] = cfg.s;
  art.report["N"] = n;
  art.report["manufactured"] = cfg.manufactured;
  art.report["amplitude"] = cfg.amplitude;
  art.report["converged"] = rep.converged;
  art.report["iterations"] = rep.iterations;
  art.report["initial_energy"] = rep.initial_energy;
  art.report["final_energy"] = rep.final_energy;
  art.report["grad_norm"] = rep.el_residual;
  art.report["energy_decreased"] = rep.final_energy <= rep.initial_energy;
  art.report["gauged_antisymmetry_defect"] = gauged.antisymmetry_defect();
  art.report["formula_consistency"] = formula_diff;
  art.report["conservation_residual"] = cons.residual;
  art.report["conservation_scale"] = cons.scale;
  art.report["orthogonality_defect"] = p.orthogonality_defect();
  art.success = rep.converged;
  art.wall_seconds = rep.wall_seconds;
  return art;
}

// ---------------------------------------------------------------- div-curl

RunArtifacts divcurl_experiment(const ExperimentConfig& cfg) {
  const DomainPtr dom = cfg.make_domain();
  const ExperimentStats stats = divcurl_constant_experiment(
      dom, cfg.trials, cfg.s, cfg.p, cfg.seed, cfg.lambda, cfg.threads);

  // Sanity block: with phi constant the pairing is a plain inner product
  // against a divergence-free field, so it must vanish.
  double worst_const_rel = 0;
  const int const_trials = std::min(cfg.trials, 10);
  for (int t = 0; t < const_trials; ++t) {
    auto rng = make_rng(cfg.seed, 0x636f6e73ULL + static_cast<std::uint64_t>(t));
    const OffDiagField f = divfree_project(random_offdiag_field(dom, 1, rng), cfg.s);
    const ScalarField g = random_scalar_field(dom, rng);
    ScalarField one(dom);
    one.values.setOnes();
    const double val = std::abs(divcurl_pairing(one, f, g, cfg.s));
    const double scale =
        offdiag_lp_norm(f, 2) * offdiag_lp_norm(s_gradient(g, cfg.s), 2);
    worst_const_rel = std::max(worst_const_rel, val / std::max(scale, 1e-300));
  }

  double max_localized = 0;
  for (const auto& t : stats.trials)
    if (!t.skipped) max_localized = std::max(max_localized, t.localized_ratio);

  RunArtifacts art;
  art.trace_columns = {"trial", "ratio", "localized_ratio", "center", "radius",
                       "skipped"};
  for (const auto& t : stats.trials)
    art.trace_rows.push_back({static_cast<double>(t.trial), t.ratio,
                              t.localized_ratio, static_cast<double>(t.center),
                              t.radius, t.skipped ? 1.0 : 0.0});
  art.report["experiment"] = "divcurl";
  art.report["nodes"] = dom->size();
  art.report["s"] = cfg.s;
  art.report["p"] = cfg.p;
  art.report["lambda"] = cfg.lambda;
  art.report["trials"] = cfg.trials;
  art.report["skipped"] = stats.skipped;
  art.report["max_ratio"] = stats.max_ratio;
  art.report["median_ratio"] = stats.median_ratio;
  art.report["q90_ratio"] = stats.q90_ratio;
  art.report["max_localized_ratio"] = max_localized;
  art.report["const_phi_max_rel_pairing"] = worst_const_rel;
  art.success = true;
  return art;
}

// ------------------------------------------------------------------- wente

RunArtifacts wente_experiment_run(const ExperimentConfig& cfg) {
  const DomainPtr dom = cfg.make_domain();
  const ExperimentStats stats =
      wente_experiment(dom, cfg.trials, cfg.s, cfg.seed, cfg.threads);

  RunArtifacts art;
  art.trace_columns = {"trial", "ratio", "skipped"};
  for (const auto& t : stats.trials)
    art.trace_rows.push_back(
        {static_cast<double>(t.trial), t.ratio, t.skipped ? 1.0 : 0.0});
  art.report["experiment"] = "wente";
  art.report["nodes"] = dom->size();
  art.report["s"] = cfg.s;
  art.report["trials"] = cfg.trials;
  art.report["skipped"] = stats.skipped;
  art.report["max_ratio"] = stats.max_ratio;
  art.report["median_ratio"] = stats.median_ratio;
  art.report["q90_ratio"] = stats.q90_ratio;
  art.success = true;
  return art;
}

// ---------------------------------------------------------------- tangency

RunArtifacts tangency_experiment(const ExperimentConfig& cfg) {
  const DomainPtr dom = cfg.make_domain();
  RunArtifacts art;
  art.trace_columns = {"trial", "max_ratio", "mean_ratio"};
  double worst_dev = 0;
  for (int t = 0; t < cfg.trials; ++t) {
    auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(t));
    const SphereMap u =
        project_sphere(random_unit_map(dom, cfg.target_dim, rng));
    const TangencyReport rep = tangency_defect(u);
    art.trace_rows.push_back(
        {static_cast<double>(t), rep.max_ratio, rep.mean_ratio});
    worst_dev = std::max({worst_dev, std::abs(rep.max_ratio - 0.5),
                          std::abs(rep.mean_ratio - 0.5)});
  }
  // Structured map: the degree-1 equator embedding.
  {
    ExperimentConfig icfg = cfg;
    icfg.init = "equator";
    icfg.perturb = 0;
    const TangencyReport rep = tangency_defect(initial_map(icfg, dom));
    art.trace_rows.push_back({-1.0, rep.max_ratio, rep.mean_ratio});
    worst_dev = std::max({worst_dev, std::abs(rep.max_ratio - 0.5),
                          std::abs(rep.mean_ratio - 0.5)});
  }
  art.report["experiment"] = "tangency";
  art.report["nodes"] = dom->size();
  art.report["N"] = cfg.target_dim;
  art.report["trials"] = cfg.trials;
  art.report["max_abs_deviation_from_half"] = worst_dev;
  art.report["tolerance"] = cfg.tol;
  art.success = worst_dev <= cfg.tol;
  art.report["all_within_tolerance"] = art.success;
  return art;
}

}  // namespace

std::vector<std::string> list_experiments() {
  return {"ops-check", "halfharmonic", "wsp-sphere", "gauge",
          "divcurl",   "wente",        "tangency"};
}

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  RunArtifacts art;
  if (cfg.experiment == "ops-check") {
    art = ops_check(cfg);
  } else if (cfg.experiment == "halfharmonic" || cfg.experiment == "wsp-sphere") {
    art = harmonic_experiment(cfg);
  } else if (cfg.experiment == "gauge") {
    art = gauge_experiment(cfg);
  } else if (cfg.experiment == "divcurl") {
    art = divcurl_experiment(cfg);
  } else if (cfg.experiment == "wente") {
    art = wente_experiment_run(cfg);
  } else if (cfg.experiment == "tangency") {
    art = tangency_experiment(cfg);
  } else {
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  }
  art.report["seed"] = cfg.seed;
  art.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return art;
}

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int run(const ExperimentConfig& cfg) {
  const RunArtifacts art = run_experiment(cfg);

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + cfg.out_dir + "'");

  const auto path = [&](const char* name) {
    return std::filesystem::path(cfg.out_dir) / name;
  };

  {
    std::ofstream out(path("report.json"));
    if (!out) throw ConfigError("cannot write report.json");
    out << art.report.dump(2) << "\n";
  }
  {
    std::ofstream out(path("trace.csv"));
    if (!out) throw ConfigError("cannot write trace.csv");
    for (size_t c = 0; c < art.trace_columns.size(); ++c)
      out << (c ? "," : "") << art.trace_columns[c];
    out << "\n";
    for (const auto& row : art.trace_rows) {
      for (size_t c = 0; c < row.size(); ++c)
        out << (c ? "," : "") << format_value(row[c]);
      out << "\n";
    }
  }
  {
    nlohmann::json meta;
    meta["version"] = kToolVersion;
    meta["experiment"] = cfg.experiment;
    meta["config"] = cfg.raw;
    meta["threads"] = cfg.threads;
    meta["wall_seconds"] = art.wall_seconds;
    meta["success"] = art.success;
    std::ofstream out(path("meta.json"));
    if (!out) throw ConfigError("cannot write meta.json");
    out << meta.dump(2) << "\n";
  }

  if (!art.success && cfg.require_convergence) return 1;
  return 0;
}

}  // namespace fdc
