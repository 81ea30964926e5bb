#include "fdc/fracops.hpp"

#include <cmath>

namespace fdc {

namespace {

void require_s(double s, const char* what) {
  require(s > 0 && s < 1, std::string(what) + ": s must lie in (0,1)");
}

void require_p(double p, const char* what) {
  require(p >= 1, std::string(what) + ": exponent must be >= 1");
}

// Matrix of pairwise differences f_i - f_j.
Eigen::MatrixXd outer_diff(const Eigen::VectorXd& f) {
  const auto m = f.size();
  return f.replicate(1, m) - f.transpose().replicate(m, 1);
}

}  // namespace

OffDiagField s_gradient(const ScalarField& f, double s) {
  require_s(s, "s_gradient");
  require(f.dom != nullptr, "s_gradient: field has no domain");
  OffDiagField out(f.dom, 1);
  const Eigen::MatrixXd w = f.dom->inv_dist_pow(s);
  out.comp(0) = outer_diff(f.values).cwiseProduct(w);
  return out;
}

OffDiagField s_gradient(const VectorMap& u, double s) {
  require_s(s, "s_gradient");
  require(u.dom != nullptr, "s_gradient: field has no domain");
  OffDiagField out(u.dom, u.target_dim());
  const Eigen::MatrixXd w = u.dom->inv_dist_pow(s);
  for (int c = 0; c < u.target_dim(); ++c)
    out.comp(c) = outer_diff(u.values.col(c)).cwiseProduct(w);
  return out;
}

ScalarField pairing(const OffDiagField& f, const OffDiagField& g) {
  require_same_domain(f.dom(), g.dom(), "pairing");
  require(f.comps() == g.comps(), "pairing: component counts differ");
  const Domain& dom = *f.dom();
  const Eigen::MatrixXd w = dom.inv_dist_pow(dom.dim());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dom.size(), dom.size());
  for (int c = 0; c < f.comps(); ++c)
    acc.array() += f.comp(c).array() * g.comp(c).array();
  acc.diagonal().setZero();
  return {f.dom(), acc.cwiseProduct(w) * dom.weights()};
}

ScalarField local_p_norm(const OffDiagField& f, double p) {
  require_p(p, "local_p_norm");
  require(f.dom() != nullptr, "local_p_norm: field has no domain");
  const Domain& dom = *f.dom();
  const Eigen::MatrixXd w = dom.inv_dist_pow(dom.dim());
  const Eigen::MatrixXd amp = f.norm_sq().array().pow(p / 2).matrix();
  Eigen::VectorXd sums = amp.cwiseProduct(w) * dom.weights();
  return {f.dom(), sums.array().pow(1.0 / p).matrix()};
}

namespace {

double offdiag_lp_total(const OffDiagField& f, double p,
                        const Eigen::ArrayXd* window_mask) {
  const Domain& dom = *f.dom();
  const Eigen::MatrixXd w = dom.inv_dist_pow(dom.dim());
  Eigen::MatrixXd amp = f.norm_sq().array().pow(p / 2).matrix();
  if (window_mask) {
    // Ordered pair (i,j) participates iff i or j lies in the window.
    const Eigen::ArrayXXd bi = window_mask->replicate(1, dom.size());
    amp.array() *= bi.max(bi.transpose());
  }
  const Eigen::VectorXd& mu = dom.weights();
  return mu.dot(amp.cwiseProduct(w) * mu);
}

}  // namespace

double offdiag_lp_norm(const OffDiagField& f, double p) {
  require_p(p, "offdiag_lp_norm");
  require(f.dom() != nullptr, "offdiag_lp_norm: field has no domain");
  return std::pow(offdiag_lp_total(f, p, nullptr), 1.0 / p);
}

double offdiag_lp_norm(const OffDiagField& f, double p, const Ball& window) {
  require_p(p, "offdiag_lp_norm");
  require(f.dom() != nullptr, "offdiag_lp_norm: field has no domain");
  Eigen::ArrayXd mask = Eigen::ArrayXd::Zero(f.dom()->size());
  for (int j : ball_members(*f.dom(), window)) mask[j] = 1.0;
  return std::pow(offdiag_lp_total(f, p, &mask), 1.0 / p);
}

double gagliardo_seminorm(const ScalarField& f, double s, double p) {
  return offdiag_lp_norm(s_gradient(f, s), p);
}

double gagliardo_seminorm(const VectorMap& u, double s, double p) {
  return offdiag_lp_norm(s_gradient(u, s), p);
}

ScalarField s_divergence(const OffDiagField& f, double s) {
  require_s(s, "s_divergence");
  require(f.dom() != nullptr, "s_divergence: field has no domain");
  require(f.comps() == 1, "s_divergence: expects a single-component field");
  const Domain& dom = *f.dom();
  const Eigen::MatrixXd w = dom.inv_dist_pow(dom.dim() + s);
  const Eigen::MatrixXd a = f.comp(0) - f.comp(0).transpose();
  return {f.dom(), a.cwiseProduct(w) * dom.weights()};
}

ScalarField s_divergence_abs(const OffDiagField& f, double s) {
  require_s(s, "s_divergence_abs");
  require(f.dom() != nullptr, "s_divergence_abs: field has no domain");
  require(f.comps() == 1, "s_divergence_abs: expects a single-component field");
  const Domain& dom = *f.dom();
  const Eigen::MatrixXd w = dom.inv_dist_pow(dom.dim() + s);
  const Eigen::MatrixXd a =
      f.comp(0).cwiseAbs() + f.comp(0).transpose().cwiseAbs();
  return {f.dom(), a.cwiseProduct(w) * dom.weights()};
}

ScalarField fractional_laplacian(const ScalarField& f, double s) {
  require_s(s, "fractional_laplacian");
  require(f.dom != nullptr, "fractional_laplacian: field has no domain");
  const Domain& dom = *f.dom;
  const Eigen::MatrixXd w = dom.inv_dist_pow(dom.dim() + 2 * s);
  const Eigen::VectorXd row_mass = w * dom.weights();
  Eigen::VectorXd out =
      f.values.cwiseProduct(row_mass) - w * f.values.cwiseProduct(dom.weights());
  return {f.dom, std::move(out)};
}

double xspq_seminorm(const ScalarField& f, double s, double p, double q) {
  require_s(s, "xspq_seminorm");
  require_p(p, "xspq_seminorm");
  require_p(q, "xspq_seminorm");
  require(f.dom != nullptr, "xspq_seminorm: field has no domain");
  const Domain& dom = *f.dom;
  const Eigen::MatrixXd w = dom.inv_dist_pow(dom.dim() + s * q);
  const Eigen::MatrixXd amp = outer_diff(f.values).array().abs().pow(q).matrix();
  Eigen::VectorXd inner = amp.cwiseProduct(w) * dom.weights();
  const double total = dom.weights().dot(inner.array().pow(p / q).matrix());
  return std::pow(total, 1.0 / p);
}

}  // namespace fdc
