#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fdc/domain.hpp"
#include "fdc/errors.hpp"
#include "helpers.hpp"

using fdc::Ball;
using fdc::Topology;

TEST_CASE("1D torus lattice: nodes, weights, minimal-image distances") {
  auto dom = fdc::build_domain(1, Topology::Torus, 4, 1.0);
  REQUIRE(dom->size() == 4);
  CHECK(dom->nodes()(0, 0) == doctest::Approx(0.0));
  CHECK(dom->nodes()(1, 0) == doctest::Approx(0.25));
  CHECK(dom->nodes()(2, 0) == doctest::Approx(0.5));
  CHECK(dom->nodes()(3, 0) == doctest::Approx(0.75));
  for (int i = 0; i < 4; ++i) CHECK(dom->weights()(i) == doctest::Approx(0.25));
  // Wrap-around shortens long hops: 0 -> 2 is half the circle, 0 -> 3 one step.
  CHECK(dom->dist()(0, 2) == doctest::Approx(0.5));
  CHECK(dom->dist()(0, 3) == doctest::Approx(0.25));
  CHECK(dom->dist()(3, 0) == doctest::Approx(0.25));
  CHECK(dom->volume() == doctest::Approx(1.0));
  CHECK(dom->diameter() == doctest::Approx(0.5));
  CHECK(dom->min_spacing() == doctest::Approx(0.25));
}

TEST_CASE("1D box lattice keeps straight-line distances") {
  auto dom = fdc::build_domain(1, Topology::Box, 4, 1.0);
  CHECK(dom->dist()(0, 3) == doctest::Approx(0.75));
  CHECK(dom->dist()(0, 2) == doctest::Approx(0.5));
  CHECK(dom->diameter() == doctest::Approx(0.75));
}

TEST_CASE("2D torus lattice: size, total mass, distance cap") {
  auto dom = fdc::build_domain(2, Topology::Torus, 8, 2.0);
  REQUIRE(dom->size() == 64);
  CHECK(dom->weights().sum() == doctest::Approx(4.0));  // L^n
  CHECK(dom->volume() == doctest::Approx(4.0));
  // No minimal-image distance can exceed (L/2) * sqrt(n).
  const double cap = 0.5 * 2.0 * std::sqrt(2.0) + 1e-12;
  CHECK(dom->dist().maxCoeff() <= cap);
  // Distances vanish exactly on the diagonal and nowhere else.
  for (int i = 0; i < dom->size(); ++i) {
    CHECK(dom->dist()(i, i) == 0.0);
    for (int j = 0; j < dom->size(); ++j)
      if (i != j) CHECK(dom->dist()(i, j) > 0.0);
  }
}

TEST_CASE("total mass equals volume at every resolution") {
  for (int m : {4, 8, 16, 32}) {
    auto d1 = fdc::build_domain(1, Topology::Torus, m, 3.0);
    CHECK(d1->weights().sum() == doctest::Approx(3.0));
    auto d2 = fdc::build_domain(2, Topology::Box, m, 1.5);
    CHECK(d2->weights().sum() == doctest::Approx(2.25));
  }
}

TEST_CASE("distance matrix is symmetric and satisfies the triangle inequality") {
  auto dom = fdc::build_domain(2, Topology::Torus, 6, 1.0);
  const auto& d = dom->dist();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, dom->size() - 1);
  for (int t = 0; t < 200; ++t) {
    const int i = pick(rng), j = pick(rng), k = pick(rng);
    CHECK(d(i, j) == doctest::Approx(d(j, i)));
    CHECK(d(i, j) <= d(i, k) + d(k, j) + 1e-12);
  }
}

TEST_CASE("domain construction rejects invalid requests") {
  CHECK_THROWS_AS(fdc::build_domain(3, Topology::Torus, 8, 1.0),
                  fdc::PreconditionError);
  CHECK_THROWS_AS(fdc::build_domain(0, Topology::Torus, 8, 1.0),
                  fdc::PreconditionError);
  CHECK_THROWS_AS(fdc::build_domain(1, Topology::Torus, 3, 1.0),
                  fdc::PreconditionError);
  CHECK_THROWS_AS(fdc::build_domain(1, Topology::Torus, 8, 0.0),
                  fdc::PreconditionError);
  CHECK_THROWS_AS(fdc::build_domain(1, Topology::Torus, 8, -2.0),
                  fdc::PreconditionError);
}

TEST_CASE("ball membership uses strict inequality around the center") {
  auto dom = fdc::build_domain(1, Topology::Torus, 8, 1.0);  // h = 0.125
  SUBCASE("radius reaching one step each way") {
    auto members = fdc::ball_members(*dom, Ball{0, 0.2});
    std::set<int> got(members.begin(), members.end());
    CHECK(got == std::set<int>{7, 0, 1});
  }
  SUBCASE("radius below the spacing keeps only the center") {
    auto members = fdc::ball_members(*dom, Ball{3, 0.0625});
    REQUIRE(members.size() == 1);
    CHECK(members[0] == 3);
  }
  SUBCASE("huge radius captures every node") {
    auto members = fdc::ball_members(*dom, Ball{2, 10.0});
    CHECK(static_cast<int>(members.size()) == dom->size());
  }
  SUBCASE("radius equal to a distance excludes that node") {
    // d(0,1) = 0.125 exactly; strict comparison drops node 1.
    auto members = fdc::ball_members(*dom, Ball{0, 0.125});
    std::set<int> got(members.begin(), members.end());
    CHECK(got == std::set<int>{0});
  }
  SUBCASE("invalid balls are rejected") {
    CHECK_THROWS_AS(fdc::ball_members(*dom, Ball{0, 0.0}),
                    fdc::PreconditionError);
    CHECK_THROWS_AS(fdc::ball_members(*dom, Ball{-1, 0.5}),
                    fdc::PreconditionError);
    CHECK_THROWS_AS(fdc::ball_members(*dom, Ball{8, 0.5}),
                    fdc::PreconditionError);
  }
}

TEST_CASE("dyadic radii double from twice the spacing up to the cap") {
  auto dom = fdc::build_domain(1, Topology::Torus, 16, 1.0);  // h = 1/16
  auto radii = fdc::dyadic_radii(*dom, 0.5);
  // 2h = 1/8, then 1/4, 1/2; the next (1) exceeds the cap.
  REQUIRE(radii.size() == 3);
  CHECK(radii[0] == doctest::Approx(0.125));
  CHECK(radii[1] == doctest::Approx(0.25));
  CHECK(radii[2] == doctest::Approx(0.5));

  // Even a tiny cap yields at least the smallest radius.
  auto tiny = fdc::dyadic_radii(*dom, 1e-6);
  REQUIRE(tiny.size() == 1);
  CHECK(tiny[0] == doctest::Approx(0.125));
}

TEST_CASE("hand-built tiny torus matches the factory construction") {
  auto tiny = tiny_torus_1d(4, 1.0);
  auto ref = fdc::build_domain(1, Topology::Torus, 4, 1.0);
  CHECK((tiny->dist() - ref->dist()).cwiseAbs().maxCoeff() ==
        doctest::Approx(0.0));
  CHECK((tiny->weights() - ref->weights()).cwiseAbs().maxCoeff() ==
        doctest::Approx(0.0));
}

TEST_CASE("inverse distance powers vanish on the diagonal") {
  auto dom = tiny_torus_1d(3, 1.0);  // all off-diagonal distances 1/3
  const Eigen::MatrixXd w = dom->inv_dist_pow(1.5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j)
        CHECK(w(i, j) == 0.0);
      else
        CHECK(w(i, j) == doctest::Approx(std::pow(3.0, 1.5)));
    }
}
