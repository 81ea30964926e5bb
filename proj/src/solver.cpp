#include "fdc/solver.hpp"

#include <chrono>
#include <cmath>

namespace fdc {

namespace {

void require_sp(double s, double p, const char* what) {
  require(s > 0 && s < 1, std::string(what) + ": s must lie in (0,1)");
  require(p >= 2, std::string(what) + ": p must be >= 2");
}

// |u_i - u_j|^2 per pair, zero diagonal.  Computed from explicit row
// differences: the Gram-identity form |u_i|^2 + |u_j|^2 - 2 u_i.u_j loses
// every significant digit once chords shrink toward rounding scale, which
// poisons line searches near collapsed maps.
Eigen::MatrixXd chord_norm_sq(const Eigen::MatrixXd& u) {
  const auto m = u.rows();
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double d2 = (u.row(i) - u.row(j)).squaredNorm();
      out(i, j) = d2;
      out(j, i) = d2;
    }
  }
  return out;
}

// (c2 + t)^(p/2) - c2^(p/2), accurate relative to its own magnitude even
// when |t| << c2 (expm1/log1p avoid the subtraction of nearby powers).
double amp_diff(double c2, double t, double p) {
  if (t == 0.0) return 0.0;
  if (c2 <= 0.0) return std::pow(std::max(t, 0.0), p / 2);
  if (p == 2.0) return t;
  const double r = t / c2;
  if (r <= -1.0) return -std::pow(c2, p / 2);
  return std::pow(c2, p / 2) * std::expm1(0.5 * p * std::log1p(r));
}

// E(u + delta) - E(u) accumulated pair by pair in difference form.
// Evaluating the two energies separately caps resolvable decreases at the
// rounding floor of the total (~1e-16 E), which stalls descent well above
// useful stationarity tolerances; here each pair contributes the
// exact-to-rounding change (t = |d+dd|^2 - |d|^2 expanded as
// 2<d,dd> + |dd|^2), so the sum stays meaningful down to decreases
// ~1e-16 of the *step* scale.
double energy_decrease(const Domain& dom, const Eigen::MatrixXd& u,
                       const Eigen::MatrixXd& delta, const Eigen::MatrixXd& w,
                       double p) {
  const auto m = u.rows();
  double acc = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const auto d = u.row(i) - u.row(j);
      const auto dd = delta.row(i) - delta.row(j);
      const double c2 = d.squaredNorm();
      const double t = 2.0 * d.dot(dd) + dd.squaredNorm();
      acc += amp_diff(c2, t, p) * w(i, j) * dom.weights()(i) *
             dom.weights()(j);
    }
  return 2.0 * acc;  // both orderings of each pair contribute equally
}

// Displacement of the step-and-renormalize retraction,
//   delta = (u - tau * tang) / |u - tau * tang| - u,
// in closed form: with rho = tau (tau |tang|^2 - 2 <u, tang>) per row and
// r = sqrt(1 + rho),  delta = (-tau * tang - u * rho / (1 + r)) / r.
// Every term scales with tau, so the Armijo decrease carries no
// tau-independent rounding (forming `normalize(...) - u` from stored rows
// injects ~1e-16-per-entry noise that swamps small true decreases).
Eigen::MatrixXd retraction_delta(const Eigen::MatrixXd& u,
                                 const Eigen::MatrixXd& tang, double tau) {
  const Eigen::ArrayXd a = (u.array() * tang.array()).rowwise().sum();
  const Eigen::ArrayXd b = tang.array().square().rowwise().sum();
  const Eigen::ArrayXd rho = tau * (tau * b - 2.0 * a);
  const Eigen::ArrayXd r = (1.0 + rho).sqrt();
  const Eigen::ArrayXd radial = rho / (1.0 + r);
  Eigen::MatrixXd delta =
      (-tau) * tang - (radial.matrix().asDiagonal() * u);
  delta.array().colwise() /= r;
  return delta;
}

// |u_i - u_j|^(p-2) per pair (ones off-diagonal for p == 2).
Eigen::MatrixXd chord_pow(const Eigen::MatrixXd& u, double p) {
  const auto m = u.rows();
  if (p == 2.0) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Ones(m, m);
    out.diagonal().setZero();
    return out;
  }
  Eigen::MatrixXd out = chord_norm_sq(u).array().pow((p - 2) / 2).matrix();
  out.diagonal().setZero();
  return out;
}

}  // namespace

double energy(const VectorMap& u, double s, double p) {
  require_sp(s, p, "energy");
  require(u.dom != nullptr, "energy: missing domain");
  const Domain& dom = *u.dom;
  const Eigen::MatrixXd w = dom.inv_dist_pow(dom.dim() + s * p);
  const Eigen::MatrixXd amp =
      chord_norm_sq(u.values).array().pow(p / 2).matrix();
  return dom.weights().dot(amp.cwiseProduct(w) * dom.weights());
}

double energy(const SphereMap& u, double s, double p) { return energy(u.map, s, p); }

VectorMap energy_gradient(const VectorMap& u, double s, double p) {
  require_sp(s, p, "energy_gradient");
  require(u.dom != nullptr, "energy_gradient: missing domain");
  const Domain& dom = *u.dom;
  const Eigen::MatrixXd kernel =
      chord_pow(u.values, p).cwiseProduct(dom.inv_dist_pow(dom.dim() + s * p));
  const Eigen::VectorXd row_mass = kernel * dom.weights();
  Eigen::MatrixXd grad =
      2 * p *
      (row_mass.asDiagonal() * u.values -
       kernel * (dom.weights().asDiagonal() * u.values));
  return {u.dom, std::move(grad)};
}

VectorMap energy_gradient(const SphereMap& u, double s, double p) {
  return energy_gradient(u.map, s, p);
}

namespace {

// Rows of the tangential part (I - u_k u_k^T) grad_k.
Eigen::MatrixXd tangential(const Eigen::MatrixXd& u, const Eigen::MatrixXd& g) {
  const Eigen::VectorXd dots = (u.array() * g.array()).rowwise().sum();
  return g - dots.asDiagonal() * u;
}

}  // namespace

double el_residual(const SphereMap& u, double s, double p) {
  const Eigen::MatrixXd t =
      tangential(u.map.values, energy_gradient(u, s, p).values);
  return t.rowwise().norm().maxCoeff();
}

std::pair<SphereMap, SolveReport> solve_harmonic_map(const SphereMap& u0,
                                                     double s, double p,
                                                     const SolverConfig& cfg) {
  require_sp(s, p, "solve_harmonic_map");
  require(cfg.tol > 0, "solve_harmonic_map: tolerance must be positive");
  require(cfg.max_iters >= 0, "solve_harmonic_map: max_iters must be >= 0");
  const auto t_start = std::chrono::steady_clock::now();

  const Domain& dom = *u0.dom();
  const Eigen::MatrixXd kernel_w = dom.inv_dist_pow(dom.dim() + s * p);
  Eigen::MatrixXd u = u0.map.values;
  double e = energy(u0, s, p);
  double step = cfg.step0;

  SolveReport rep;
  rep.initial_energy = e;
  auto record = [&](double res) {
    if (!cfg.record_trace) return;
    rep.energy_trace.push_back(e);
    rep.residual_trace.push_back(res);
  };

  bool converged = false;
  int iter = 0;
  for (; iter <= cfg.max_iters; ++iter) {
    const Eigen::MatrixXd grad =
        energy_gradient(VectorMap{u0.dom(), u}, s, p).values;
    const Eigen::MatrixXd tang = tangential(u, grad);
    const double res = tang.rowwise().norm().maxCoeff();
    record(res);
    if (res <= cfg.tol) {
      converged = true;
      break;
    }
    if (iter == cfg.max_iters) break;

    // Squared gradient norm in the weighted inner product: the predicted
    // first-order decrease per unit step.
    const double g2 = dom.weights().dot(tang.rowwise().squaredNorm());
    double tau = 2 * step;
    bool accepted = false;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
      const Eigen::MatrixXd delta = retraction_delta(u, tang, tau);
      const double de = energy_decrease(dom, u, delta, kernel_w, p);
      if (de <= -cfg.armijo_c * tau * g2) {
        u += delta;
        e += de;
        step = tau;
        accepted = true;
        break;
      }
      tau *= cfg.backtrack;
    }
    if (!accepted) break;  // line search stalled below rounding
    if (cfg.record_trace) rep.step_trace.push_back(step);
  }

  rep.converged = converged;
  rep.iterations = iter;
  rep.final_energy = e;
  SphereMap out{VectorMap{u0.dom(), u}};
  rep.el_residual = el_residual(out, s, p);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return {std::move(out), std::move(rep)};
}

OffDiagField sphere_omega(const SphereMap& u, double s) {
  require(s > 0 && s < 1, "sphere_omega: s must lie in (0,1)");
  const int n = u.target_dim();
  const OffDiagField grad = s_gradient(u.map, s);
  OffDiagField out(u.dom(), n * (n - 1) / 2);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k, ++idx)
      out.comp(idx) = u.map.values.col(i).asDiagonal() * grad.comp(k) -
                      u.map.values.col(k).asDiagonal() * grad.comp(i);
  return out;
}

OffDiagField killing_omega(const SphereMap& u, double s) {
  require(s > 0 && s < 1, "killing_omega: s must lie in (0,1)");
  const int n = u.target_dim();
  const KillingBasis basis(n);
  const Eigen::MatrixXd inv_ds = u.dom()->inv_dist_pow(s);
  OffDiagField out(u.dom(), basis.count());
  for (int g = 0; g < basis.count(); ++g) {
    // Rows of xg are X_g(u_a) = A_g u_a.
    Eigen::MatrixXd xg = u.map.values * basis.generator(g).transpose();
    // (1/2) <X_g(u_a) + X_g(u_b), u_a - u_b>; the <X_g(u_a), u_a> terms
    // vanish by antisymmetry, leaving (C^T - C)/2 with C_ab = <X_g(u_a), u_b>.
    const Eigen::MatrixXd c = xg * u.map.values.transpose();
    out.comp(g) = (0.5 * (c.transpose() - c)).cwiseProduct(inv_ds);
  }
  return out;
}

Eigen::MatrixXd pairwise_p_weight(const SphereMap& u, double s, double p) {
  require_sp(s, p, "pairwise_p_weight");
  if (p == 2.0) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Ones(u.size(), u.size());
    w.diagonal().setZero();
    return w;
  }
  return chord_pow(u.map.values, p)
      .cwiseProduct(u.dom()->inv_dist_pow(s * (p - 2)));
}

ConservationReport conservation_residual(const SphereMap& u, double s, double p,
                                         OmegaFamily family) {
  require_sp(s, p, "conservation_residual");
  const OffDiagField omega =
      family == OmegaFamily::Sphere ? sphere_omega(u, s) : killing_omega(u, s);
  const Eigen::MatrixXd w = pairwise_p_weight(u, s, p);
  ConservationReport rep;
  for (int c = 0; c < omega.comps(); ++c) {
    OffDiagField weighted(u.dom(), 1);
    weighted.comp(0) = omega.comp(c).cwiseProduct(w);
    const double res =
        s_divergence(weighted, s).values.array().abs().maxCoeff();
    const double mass =
        s_divergence_abs(weighted, s).values.array().abs().maxCoeff();
    rep.per_component.push_back(res);
    rep.residual = std::max(rep.residual, res);
    rep.scale = std::max(rep.scale, mass);
  }
  return rep;
}

}  // namespace fdc
