#pragma once

#include <cmath>
#include <cstdint>
#include <memory>

#include "fdc/domain.hpp"
#include "fdc/rng.hpp"

// Hand-built uniform 1D torus lattice with any node count (the library
// factory insists on >= 4 nodes per axis; tiny cases are wired directly so
// closed-form expected values stay small enough to verify by hand).
inline fdc::DomainPtr tiny_torus_1d(int m, double length = 1.0) {
  const double h = length / m;
  Eigen::MatrixXd nodes(m, 1);
  for (int i = 0; i < m; ++i) nodes(i, 0) = i * h;
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(m, h);
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double delta = std::abs(nodes(i, 0) - nodes(j, 0));
      dist(i, j) = std::min(delta, length - delta);
    }
  return std::make_shared<fdc::Domain>(1, fdc::Topology::Torus, length,
                                       std::move(nodes), std::move(weights),
                                       std::move(dist));
}

// Seeded one-shot draws for tests that just need a fixed arbitrary field.
inline fdc::ScalarField rand_scalar(const fdc::DomainPtr& dom,
                                    std::uint64_t seed) {
  auto rng = fdc::make_rng(seed);
  return fdc::random_scalar_field(dom, rng);
}

inline fdc::OffDiagField rand_offdiag(const fdc::DomainPtr& dom, int comps,
                                      std::uint64_t seed) {
  auto rng = fdc::make_rng(seed);
  return fdc::random_offdiag_field(dom, comps, rng);
}

inline fdc::VectorMap rand_unit(const fdc::DomainPtr& dom, int n,
                                std::uint64_t seed) {
  auto rng = fdc::make_rng(seed);
  return fdc::random_unit_map(dom, n, rng);
}
