#pragma once

#include <utility>
#include <vector>

#include "fdc/fracops.hpp"
#include "fdc/manifold.hpp"

namespace fdc {

// Nonlocal Dirichlet p-energy of a node-wise map,
//   E_{s,p}(u) = sum_{i != j} |u_i - u_j|^p w_i w_j / dist(i,j)^(n+sp)
//              = || d_s u ||^p in the off-diagonal L^p norm.
// Defined for any map; the sphere-map overloads evaluate the same formula.
// Requires s in (0,1), p >= 2.
double energy(const VectorMap& u, double s, double p);
double energy(const SphereMap& u, double s, double p);

// Gradient of the energy in the weighted inner product
// <a, b> = sum_k <a_k, b_k> w_k:
//   grad_k = 2p sum_{j != k} |u_k - u_j|^(p-2) (u_k - u_j) w_j / dist(k,j)^(n+sp),
// so sum_k <grad_k, v_k> w_k is the directional derivative along v.
VectorMap energy_gradient(const VectorMap& u, double s, double p);
VectorMap energy_gradient(const SphereMap& u, double s, double p);

// Sup-norm of the Riemannian (tangential) gradient:
//   max_k | (I - u_k u_k^T) grad_k |.
// Zero exactly at critical points of the energy restricted to sphere maps.
double el_residual(const SphereMap& u, double s, double p);

struct SolverConfig {
  double tol = 1e-8;        // stop when el_residual <= tol
  int max_iters = 200000;
  double step0 = 1.0;       // first trial step
  double armijo_c = 1e-4;   // sufficient-decrease fraction
  double backtrack = 0.5;   // step shrink factor
  int max_backtracks = 60;
  bool record_trace = true;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double initial_energy = 0;
  double final_energy = 0;
  double el_residual = 0;
  double wall_seconds = 0;
  // Per accepted iterate (index 0 = initial point); steps start at index 1.
  std::vector<double> energy_trace;
  std::vector<double> residual_trace;
  std::vector<double> step_trace;
};

// Projected gradient descent with Armijo backtracking: step along the
// negative tangential gradient, retract by row normalization, accept when
// the energy decreases by at least armijo_c * step * |tangential grad|^2.
// Deterministic for fixed inputs.
std::pair<SphereMap, SolveReport> solve_harmonic_map(const SphereMap& u0,
                                                     double s, double p,
                                                     const SolverConfig& cfg = {});

// Conserved currents of sphere-valued critical points.
//
// Component-pair family ("sphere"): for i < k,
//   O_ik(x,y) = u^i(x) (d_s u^k)(x,y) - u^k(x) (d_s u^i)(x,y),
// components ordered lexicographically, matching pair (i,k).
OffDiagField sphere_omega(const SphereMap& u, double s);

// Rotation-generator family ("Killing"): for each generator A_g,
//   O_g(x,y) = (1/2) < A_g u(x) + A_g u(y), (d_s u)(x,y) >,
// components ordered as in KillingBasis.
OffDiagField killing_omega(const SphereMap& u, double s);

enum class OmegaFamily { Sphere, Killing };

// Divergence residual of the p-weighted currents W(x,y) = |d_s u(x,y)|^(p-2):
// zero (to rounding) exactly at critical points of the energy, for either
// family.  `scale` measures the mass the divergence sum cancels against, so
// residual/scale is a dimensionless cancellation quality.
ConservationReport conservation_residual(const SphereMap& u, double s, double p,
                                         OmegaFamily family);

// Two-point p-weight |d_s u(x,y)|^(p-2) as a pair matrix (ones when p == 2).
Eigen::MatrixXd pairwise_p_weight(const SphereMap& u, double s, double p);

}  // namespace fdc
