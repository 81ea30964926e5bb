#include <doctest.h>

#include <cmath>
#include <random>

#include "fdc/errors.hpp"
#include "fdc/manifold.hpp"
#include "helpers.hpp"

using fdc::KillingBasis;
using fdc::SphereMap;
using fdc::VectorMap;

namespace {

Eigen::VectorXd unit(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<int>(v.size()));
  int i = 0;
  for (double e : v) x(i++) = e;
  return x / x.norm();
}

}  // namespace

TEST_CASE("sphere projection normalizes rows and is idempotent") {
  auto dom = tiny_torus_1d(2);
  Eigen::MatrixXd raw(2, 2);
  raw << 3.0, 4.0, 0.0, -7.0;
  auto u = fdc::project_sphere(VectorMap{dom, raw});
  CHECK(u.map.values(0, 0) == doctest::Approx(0.6));
  CHECK(u.map.values(0, 1) == doctest::Approx(0.8));
  CHECK(u.map.values(1, 0) == doctest::Approx(0.0));
  CHECK(u.map.values(1, 1) == doctest::Approx(-1.0));

  auto again = fdc::project_sphere(u.map);
  CHECK((again.map.values - u.map.values).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("sphere projection rejects near-zero rows") {
  auto dom = tiny_torus_1d(2);
  Eigen::MatrixXd raw(2, 2);
  raw << 1.0, 0.0, 1e-13, 0.0;
  CHECK_THROWS_AS(fdc::project_sphere(VectorMap{dom, raw}),
                  fdc::PreconditionError);
}

TEST_CASE("sphere maps validate unit rows on construction") {
  auto dom = tiny_torus_1d(2);
  Eigen::MatrixXd good(2, 2), bad(2, 2);
  good << 1.0, 0.0, 0.0, 1.0;
  bad << 1.0, 0.0, 0.5, 0.5;
  CHECK_NOTHROW((SphereMap{VectorMap{dom, good}}));
  CHECK_THROWS_AS((SphereMap{VectorMap{dom, bad}}), fdc::PreconditionError);
  Eigen::MatrixXd one_col = Eigen::MatrixXd::Ones(2, 1);
  CHECK_THROWS_AS((SphereMap{VectorMap{dom, one_col}}), fdc::PreconditionError);
}

TEST_CASE("tangent projection removes exactly the radial part") {
  const auto p = unit({1.0, 2.0, 2.0});
  Eigen::VectorXd w(3);
  w << 0.3, -1.1, 0.7;
  const Eigen::VectorXd t = fdc::tangent_project(p, w);
  CHECK(std::abs(t.dot(p)) <= 1e-15);
  // Idempotent, annihilates p, and fixes already-tangent vectors.
  CHECK((fdc::tangent_project(p, t) - t).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(fdc::tangent_project(p, p).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(fdc::tangent_project(2.0 * p, w), fdc::PreconditionError);
}

TEST_CASE("rotation generator basis: count, order, antisymmetry") {
  for (int n : {2, 3, 4, 5}) {
    KillingBasis basis(n);
    CHECK(basis.count() == n * (n - 1) / 2);
    for (int g = 0; g < basis.count(); ++g) {
      const Eigen::MatrixXd a = basis.generator(g);
      CHECK((a + a.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(a.cwiseAbs().sum() == doctest::Approx(2.0));  // two entries, +-1
    }
  }
  // Lexicographic order for n = 3: (0,1), (0,2), (1,2).
  KillingBasis b3(3);
  CHECK(b3.generator(0)(0, 1) == 1.0);
  CHECK(b3.generator(0)(1, 0) == -1.0);
  CHECK(b3.generator(1)(0, 2) == 1.0);
  CHECK(b3.generator(2)(1, 2) == 1.0);
  CHECK_THROWS_AS(KillingBasis(1), fdc::PreconditionError);
}

TEST_CASE("generator application matches the explicit matrix product") {
  KillingBasis basis(4);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd p(4);
    for (int i = 0; i < 4; ++i) p(i) = gauss(rng);
    for (int g = 0; g < basis.count(); ++g) {
      const Eigen::VectorXd direct = basis.generator(g) * p;
      CHECK((basis.apply(g, p) - direct).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("any antisymmetric matrix reconstructs from the basis") {
  // <A_g, A_h>_F = 2 delta_{gh}, so B = sum_g (tr(A_g^T B)/2) A_g.
  for (int n : {2, 3, 5}) {
    KillingBasis basis(n);
    std::mt19937_64 rng(n);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd raw(n, n);
    for (int i = 0; i < n * n; ++i) raw(i / n, i % n) = gauss(rng);
    const Eigen::MatrixXd b = 0.5 * (raw - raw.transpose());
    Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(n, n);
    for (int g = 0; g < basis.count(); ++g) {
      const Eigen::MatrixXd a = basis.generator(g);
      rebuilt += 0.5 * (a.transpose() * b).trace() * a;
    }
    CHECK((rebuilt - b).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("projection identity: generator fields resolve the tangent space") {
  // sum_g (A_g p)(A_g p)^T = I - p p^T for unit p, to machine precision.
  for (int n : {2, 3, 4, 5})
    CHECK(fdc::killing_projection_identity(n, 64, 7) <= 1e-14);

  // Independent check at one explicit point.
  const auto p = unit({1.0, -2.0, 0.5});
  KillingBasis basis(3);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(3, 3);
  for (int g = 0; g < basis.count(); ++g) {
    const Eigen::VectorXd xp = basis.apply(g, p);
    acc += xp * xp.transpose();
  }
  const Eigen::MatrixXd expect =
      Eigen::MatrixXd::Identity(3, 3) - p * p.transpose();
  CHECK((acc - expect).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("chords are isotropic for every generator") {
  for (int n : {2, 3, 4, 5})
    CHECK(fdc::killing_pointwise_property(n, 64, 3) <= 1e-14);
}

TEST_CASE("chord normal defect is exactly half on the sphere") {
  auto dom = fdc::build_domain(1, fdc::Topology::Torus, 16, 1.0);
  for (int n : {2, 3, 4}) {
    auto u = rand_unit(dom, n, 17 + static_cast<unsigned>(n));
    auto rep = fdc::tangency_defect(SphereMap{u});
    CHECK(rep.max_ratio == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.mean_ratio == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.pairs == dom->size() * (dom->size() - 1));
  }
}

TEST_CASE("normal defect handles antipodal points and rejects constant maps") {
  auto dom = tiny_torus_1d(2);
  Eigen::MatrixXd anti(2, 2);
  anti << 1.0, 0.0, -1.0, 0.0;
  auto rep = fdc::tangency_defect(SphereMap{VectorMap{dom, anti}});
  CHECK(rep.max_ratio == doctest::Approx(0.5));
  CHECK(rep.pairs == 2);

  Eigen::MatrixXd same(2, 2);
  same << 1.0, 0.0, 1.0, 0.0;
  CHECK_THROWS_AS(fdc::tangency_defect(SphereMap{VectorMap{dom, same}}),
                  fdc::PreconditionError);
}
