#pragma once

#include <cstdint>
#include <random>

#include "fdc/fields.hpp"

namespace fdc {

// Deterministic per-trial RNG: one master seed, independent streams derived
// by counter so trials can run in any order (or in parallel) with identical
// results.  The mix is SplitMix64 over (seed, counter).
inline std::mt19937_64 make_rng(std::uint64_t master_seed, std::uint64_t counter = 0) {
  std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z = z ^ (z >> 31);
  return std::mt19937_64(z);
}

ScalarField random_scalar_field(const DomainPtr& dom, std::mt19937_64& rng);
OffDiagField random_offdiag_field(const DomainPtr& dom, int comps,
                                  std::mt19937_64& rng);
// Rows drawn i.i.d. Gaussian in R^n then normalized to the unit sphere.
VectorMap random_unit_map(const DomainPtr& dom, int n, std::mt19937_64& rng);
// Per ordered pair an independent antisymmetric n x n matrix.
MatrixOffDiagField random_antisym_matrix_field(const DomainPtr& dom, int n,
                                               std::mt19937_64& rng);

}  // namespace fdc
