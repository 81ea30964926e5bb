#include "fdc/gauge.hpp"

#include <chrono>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace fdc {

namespace {

constexpr double kValidationTol = 1e-10;

void require_s(double s, const char* what) {
  require(s > 0 && s < 1, std::string(what) + ": s must lie in (0,1)");
}

void require_antisym(const MatrixOffDiagField& omega, const char* what) {
  require(omega.antisymmetry_defect() <= kValidationTol,
          std::string(what) + ": connection form must be antisymmetric");
}

void require_compatible(const GaugeField& p, const MatrixOffDiagField& omega,
                        const char* what) {
  require_same_domain(p.dom, omega.dom(), what);
  require(p.matrix_dim() == omega.matrix_dim(),
          std::string(what) + ": matrix dimensions differ");
}

Eigen::MatrixXd skew_part(const Eigen::MatrixXd& a) {
  return 0.5 * (a - a.transpose());
}

}  // namespace

GaugeField::GaugeField(DomainPtr d, std::vector<Eigen::MatrixXd> r)
    : dom(std::move(d)), rotations(std::move(r)) {
  require(dom != nullptr, "gauge field: missing domain");
  require(static_cast<int>(rotations.size()) == dom->size(),
          "gauge field: one rotation per node required");
  require(!rotations.empty(), "gauge field: empty");
  const auto n = rotations[0].rows();
  require(n >= 2, "gauge field: matrix dimension must be >= 2");
  for (const auto& rot : rotations) {
    require(rot.rows() == n && rot.cols() == n,
            "gauge field: inconsistent matrix dimensions");
    const double defect =
        (rot.transpose() * rot - Eigen::MatrixXd::Identity(n, n))
            .array().abs().maxCoeff();
    require(defect <= kValidationTol, "gauge field: matrix is not orthogonal");
    require(rot.determinant() > 0, "gauge field: matrix must be a rotation");
  }
}

GaugeField GaugeField::identity(DomainPtr d, int n) {
  require(d != nullptr, "gauge field: missing domain");
  std::vector<Eigen::MatrixXd> rots(static_cast<size_t>(d->size()),
                                    Eigen::MatrixXd::Identity(n, n));
  return {std::move(d), std::move(rots)};
}

double GaugeField::orthogonality_defect() const {
  const auto n = matrix_dim();
  double worst = 0;
  for (const auto& rot : rotations)
    worst = std::max(worst,
                     (rot.transpose() * rot - Eigen::MatrixXd::Identity(n, n))
                         .array().abs().maxCoeff());
  return worst;
}

Eigen::MatrixXd so_exponential(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  require(a.cols() == n, "so_exponential: matrix must be square");
  require((a + a.transpose()).array().abs().maxCoeff() <= kValidationTol,
          "so_exponential: matrix must be antisymmetric");
  if (n == 1) return Eigen::MatrixXd::Ones(1, 1);
  if (n == 2) {
    const double t = a(0, 1);
    Eigen::MatrixXd out(2, 2);
    out << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    return out;
  }
  if (n == 3) {
    const double t = std::sqrt(a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) +
                               a(1, 2) * a(1, 2));
    const Eigen::MatrixXd a2 = a * a;
    if (t < 1e-8)  // series, accurate to ~1e-32 here
      return Eigen::MatrixXd::Identity(3, 3) + a + 0.5 * a2;
    return Eigen::MatrixXd::Identity(3, 3) + (std::sin(t) / t) * a +
           ((1 - std::cos(t)) / (t * t)) * a2;
  }
  return a.exp();
}

namespace {

// exp(a) - I for antisymmetric a, with every term scaling with a (closed
// forms for N in {2,3}): forming exp(a) and subtracting I would leave
// tau-independent rounding ~1e-16 that swamps small line-search steps.
Eigen::MatrixXd so_exponential_minus_identity(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  if (n == 2) {
    const double t = a(0, 1);
    const double cm1 = -2.0 * std::sin(t / 2) * std::sin(t / 2);
    Eigen::MatrixXd out(2, 2);
    out << cm1, std::sin(t), -std::sin(t), cm1;
    return out;
  }
  if (n == 3) {
    const double t = std::sqrt(a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) +
                               a(1, 2) * a(1, 2));
    const Eigen::MatrixXd a2 = a * a;
    if (t < 1e-4)  // 4th-order series: relative error ~t^4/120
      return a + 0.5 * a2 + (1.0 / 6.0) * (a * a2) + (1.0 / 24.0) * (a2 * a2);
    const double half_s = std::sin(t / 2);
    return (std::sin(t) / t) * a + (2.0 * half_s * half_s / (t * t)) * a2;
  }
  return a.exp() - Eigen::MatrixXd::Identity(n, n);
}

// Residual matrices R_ij = (P_i - P_j)/d^s - P_i W_ij for i != j.
MatrixOffDiagField residual_field(const GaugeField& p,
                                  const MatrixOffDiagField& omega, double s) {
  const Domain& dom = *p.dom;
  const int n = p.matrix_dim();
  const Eigen::MatrixXd inv_ds = dom.inv_dist_pow(s);
  MatrixOffDiagField res(p.dom, n);
  for (int i = 0; i < dom.size(); ++i)
    for (int j = 0; j < dom.size(); ++j) {
      if (i == j) continue;
      const Eigen::MatrixXd r =
          (p.rotations[i] - p.rotations[j]) * inv_ds(i, j) -
          p.rotations[i] * omega.pair_matrix(i, j);
      res.set_pair(i, j, r);
    }
  return res;
}

// F(P + dp) - F(P) accumulated pair by pair: each pair contributes
// k_ij (2 <R, dR>_F + |dR|_F^2) with dR_ij = (dp_i - dp_j)/d^s - dp_i W_ij,
// which scales with the step, so decreases far below the rounding floor of
// the total energy remain resolvable (cf. the sphere-map line search).
double gauge_energy_decrease(const GaugeField& p,
                             const MatrixOffDiagField& omega, double s,
                             const MatrixOffDiagField& res,
                             const std::vector<Eigen::MatrixXd>& dp) {
  const Domain& dom = *p.dom;
  const Eigen::MatrixXd& inv_ds = dom.inv_dist_pow(s);
  const Eigen::MatrixXd& kernel = dom.inv_dist_pow(dom.dim());
  const Eigen::VectorXd& mu = dom.weights();
  double acc = 0;
  for (int i = 0; i < dom.size(); ++i)
    for (int j = 0; j < dom.size(); ++j) {
      if (i == j) continue;
      const Eigen::MatrixXd dr =
          (dp[static_cast<size_t>(i)] - dp[static_cast<size_t>(j)]) *
              inv_ds(i, j) -
          dp[static_cast<size_t>(i)] * omega.pair_matrix(i, j);
      const Eigen::MatrixXd r = res.pair_matrix(i, j);
      acc += mu[i] * mu[j] * kernel(i, j) *
             (2.0 * (r.array() * dr.array()).sum() + dr.squaredNorm());
    }
  return acc;
}

}  // namespace

double gauge_energy(const GaugeField& p, const MatrixOffDiagField& omega,
                    double s) {
  require_s(s, "gauge_energy");
  require_compatible(p, omega, "gauge_energy");
  require_antisym(omega, "gauge_energy");
  const Domain& dom = *p.dom;
  const Eigen::MatrixXd amp = residual_field(p, omega, s).norm_sq();
  return dom.weights().dot(
      amp.cwiseProduct(dom.inv_dist_pow(dom.dim())) * dom.weights());
}

std::vector<Eigen::MatrixXd> gauge_gradient(const GaugeField& p,
                                            const MatrixOffDiagField& omega,
                                            double s) {
  require_s(s, "gauge_gradient");
  require_compatible(p, omega, "gauge_gradient");
  require_antisym(omega, "gauge_gradient");
  const Domain& dom = *p.dom;
  const int m = dom.size();
  const int n = p.matrix_dim();
  const Eigen::MatrixXd inv_ds = dom.inv_dist_pow(s);
  const Eigen::MatrixXd kernel = dom.inv_dist_pow(dom.dim());
  const Eigen::VectorXd& mu = dom.weights();
  const MatrixOffDiagField res = residual_field(p, omega, s);

  std::vector<Eigen::MatrixXd> grad(static_cast<size_t>(m),
                                    Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const double k = mu[i] * mu[j] * kernel(i, j);
      const Eigen::MatrixXd r = res.pair_matrix(i, j);
      // Variation at the first node: (alpha_i P_i - ...)/d^s - alpha_i P_i W.
      grad[i] += 2 * k *
                 (r * p.rotations[i].transpose() * inv_ds(i, j) -
                  r * omega.pair_matrix(i, j).transpose() *
                      p.rotations[i].transpose());
      // Variation at the second node.
      grad[j] -= 2 * k * (r * p.rotations[j].transpose() * inv_ds(i, j));
    }
  for (int k = 0; k < m; ++k) grad[k] = skew_part(grad[k]) / mu[k];
  return grad;
}

std::pair<GaugeField, SolveReport> solve_gauge(const MatrixOffDiagField& omega,
                                               double s,
                                               const SolverConfig& cfg) {
  require_s(s, "solve_gauge");
  require(omega.dom() != nullptr, "solve_gauge: missing domain");
  require_antisym(omega, "solve_gauge");
  require(cfg.tol > 0, "solve_gauge: tolerance must be positive");
  const auto t_start = std::chrono::steady_clock::now();

  const Domain& dom = *omega.dom();
  const Eigen::VectorXd& mu = dom.weights();
  GaugeField p = GaugeField::identity(omega.dom(), omega.matrix_dim());
  double e = gauge_energy(p, omega, s);
  double step = cfg.step0;

  SolveReport rep;
  rep.initial_energy = e;
  bool converged = false;
  int iter = 0;
  for (; iter <= cfg.max_iters; ++iter) {
    const std::vector<Eigen::MatrixXd> grad = gauge_gradient(p, omega, s);
    double res = 0, g2 = 0;
    for (int k = 0; k < dom.size(); ++k) {
      res = std::max(res, grad[k].norm());
      g2 += grad[k].squaredNorm() * mu[k];
    }
    if (cfg.record_trace) {
      rep.energy_trace.push_back(e);
      rep.residual_trace.push_back(res);
    }
    if (res <= cfg.tol) {
      converged = true;
      break;
    }
    if (iter == cfg.max_iters) break;

    const MatrixOffDiagField res_field = residual_field(p, omega, s);
    double tau = 2 * step;
    bool accepted = false;
    std::vector<Eigen::MatrixXd> dp(static_cast<size_t>(dom.size()));
    for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
      // dp_k = (exp(-tau G_k) - I) P_k, the retraction displacement.
      for (int k = 0; k < dom.size(); ++k)
        dp[static_cast<size_t>(k)] =
            so_exponential_minus_identity(-tau * grad[k]) * p.rotations[k];
      const double de = gauge_energy_decrease(p, omega, s, res_field, dp);
      if (de <= -cfg.armijo_c * tau * g2) {
        for (int k = 0; k < dom.size(); ++k)
          p.rotations[k] += dp[static_cast<size_t>(k)];
        e += de;
        step = tau;
        accepted = true;
        break;
      }
      tau *= cfg.backtrack;
    }
    if (!accepted) break;
    if (cfg.record_trace) rep.step_trace.push_back(step);
  }

  rep.converged = converged;
  rep.iterations = iter;
  rep.final_energy = e;
  {
    const std::vector<Eigen::MatrixXd> grad = gauge_gradient(p, omega, s);
    double res = 0;
    for (const auto& g : grad) res = std::max(res, g.norm());
    rep.el_residual = res;
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return {std::move(p), std::move(rep)};
}

namespace {

MatrixOffDiagField gauged_form(const GaugeField& p,
                               const MatrixOffDiagField& omega, double s,
                               bool general) {
  const Domain& dom = *p.dom;
  const int n = p.matrix_dim();
  const Eigen::MatrixXd inv_ds = dom.inv_dist_pow(s);
  MatrixOffDiagField out(p.dom, n);
  for (int i = 0; i < dom.size(); ++i)
    for (int j = 0; j < dom.size(); ++j) {
      if (i == j) continue;
      const Eigen::MatrixXd& pi = p.rotations[i];
      const Eigen::MatrixXd& pj = p.rotations[j];
      const Eigen::MatrixXd w = omega.pair_matrix(i, j);
      const Eigen::MatrixXd dsp = (pi - pj) * inv_ds(i, j);
      Eigen::MatrixXd val =
          dsp * (pj.transpose() + pi.transpose()) - pi * w * pj.transpose();
      if (general)
        val += pj * w.transpose() * pi.transpose();
      else
        val -= pj * w * pi.transpose();
      out.set_pair(i, j, 0.5 * val);
    }
  return out;
}

}  // namespace

MatrixOffDiagField omega_p(const GaugeField& p, const MatrixOffDiagField& omega,
                           double s) {
  require_s(s, "omega_p");
  require_compatible(p, omega, "omega_p");
  require_antisym(omega, "omega_p");
  return gauged_form(p, omega, s, /*general=*/false);
}

MatrixOffDiagField omega_p_general(const GaugeField& p,
                                   const MatrixOffDiagField& omega, double s) {
  require_s(s, "omega_p_general");
  require_compatible(p, omega, "omega_p_general");
  return gauged_form(p, omega, s, /*general=*/true);
}

ConservationReport gauge_conservation_residual(const GaugeField& p,
                                               const MatrixOffDiagField& omega,
                                               double s) {
  require_s(s, "gauge_conservation_residual");
  require_compatible(p, omega, "gauge_conservation_residual");
  require_antisym(omega, "gauge_conservation_residual");
  const MatrixOffDiagField gauged = omega_p(p, omega, s);
  ConservationReport rep;
  for (int r = 0; r < gauged.matrix_dim(); ++r)
    for (int c = r + 1; c < gauged.matrix_dim(); ++c) {
      OffDiagField comp(p.dom, 1);
      comp.comp(0) = gauged.entry(r, c);
      const double res = s_divergence(comp, s).values.array().abs().maxCoeff();
      const double mass =
          s_divergence_abs(comp, s).values.array().abs().maxCoeff();
      rep.per_component.push_back(res);
      rep.residual = std::max(rep.residual, res);
      rep.scale = std::max(rep.scale, mass);
    }
  return rep;
}

}  // namespace fdc
