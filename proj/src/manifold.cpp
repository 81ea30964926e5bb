#include "fdc/manifold.hpp"

#include <cmath>

#include "fdc/rng.hpp"

namespace fdc {

SphereMap::SphereMap(VectorMap m) : map(std::move(m)) {
  require(map.dom != nullptr, "sphere map: missing domain");
  require(map.target_dim() >= 2, "sphere map: target dimension must be >= 2");
  for (int i = 0; i < map.size(); ++i)
    require(std::abs(map.values.row(i).norm() - 1.0) <= 1e-10,
            "sphere map: rows must have unit length");
}

SphereMap project_sphere(const VectorMap& u) {
  require(u.dom != nullptr, "project_sphere: missing domain");
  VectorMap out(u.dom, u.target_dim());
  for (int i = 0; i < u.size(); ++i) {
    const double len = u.values.row(i).norm();
    require(len > 1e-12, "project_sphere: row too close to the origin");
    out.values.row(i) = u.values.row(i) / len;
  }
  return SphereMap(std::move(out));
}

Eigen::VectorXd tangent_project(const Eigen::VectorXd& p, const Eigen::VectorXd& w) {
  require(p.size() == w.size(), "tangent_project: dimension mismatch");
  require(std::abs(p.norm() - 1.0) <= 1e-10,
          "tangent_project: base point must be unit length");
  return w - p.dot(w) * p;
}

KillingBasis::KillingBasis(int n) : n_(n) {
  require(n >= 2, "killing basis: need ambient dimension >= 2");
}

Eigen::MatrixXd KillingBasis::generator(int g) const {
  require(g >= 0 && g < count(), "killing basis: generator index out of range");
  int idx = 0;
  for (int a = 0; a < n_; ++a)
    for (int b = a + 1; b < n_; ++b, ++idx)
      if (idx == g) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
        m(a, b) = 1;
        m(b, a) = -1;
        return m;
      }
  return Eigen::MatrixXd::Zero(n_, n_);  // unreachable
}

Eigen::VectorXd KillingBasis::apply(int g, const Eigen::VectorXd& p) const {
  require(p.size() == n_, "killing basis: vector dimension mismatch");
  require(g >= 0 && g < count(), "killing basis: generator index out of range");
  int idx = 0;
  for (int a = 0; a < n_; ++a)
    for (int b = a + 1; b < n_; ++b, ++idx)
      if (idx == g) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
        out[a] = p[b];
        out[b] = -p[a];
        return out;
      }
  return Eigen::VectorXd::Zero(n_);  // unreachable
}

namespace {

Eigen::VectorXd random_unit_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(n);
  do {
    for (int k = 0; k < n; ++k) v[k] = gauss(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

}  // namespace

double killing_projection_identity(int n, int trials, std::uint64_t seed) {
  KillingBasis basis(n);
  auto rng = make_rng(seed, 0x4b696c6c);
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd p = random_unit_vector(n, rng);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (int g = 0; g < basis.count(); ++g) {
      const Eigen::VectorXd xp = basis.apply(g, p);
      acc += xp * xp.transpose();
    }
    acc -= Eigen::MatrixXd::Identity(n, n) - p * p.transpose();
    worst = std::max(worst, acc.array().abs().maxCoeff());
  }
  return worst;
}

double killing_pointwise_property(int n, int trials, std::uint64_t seed) {
  KillingBasis basis(n);
  auto rng = make_rng(seed, 0x4b696c6d);
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd diff =
        random_unit_vector(n, rng) - random_unit_vector(n, rng);
    for (int g = 0; g < basis.count(); ++g)
      worst = std::max(worst, std::abs(basis.apply(g, diff).dot(diff)));
  }
  return worst;
}

TangencyReport tangency_defect(const SphereMap& u) {
  const int m = u.size();
  TangencyReport rep;
  double sum = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const Eigen::RowVectorXd chord = u.map.values.row(i) - u.map.values.row(j);
      const double len = chord.norm();
      if (len < 1e-10) continue;
      const Eigen::RowVectorXd p = u.map.values.row(j);
      const double normal = (p * p.dot(chord)).norm();
      const double ratio = normal / (len * len);
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      sum += ratio;
      ++rep.pairs;
    }
  require(rep.pairs > 0,
          "tangency_defect: no pair of distinct values (constant map)");
  rep.mean_ratio = sum / rep.pairs;
  return rep;
}

}  // namespace fdc
