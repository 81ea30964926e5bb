#pragma once

#include <cstdint>
#include <vector>

#include "fdc/fracops.hpp"

namespace fdc {

// Radial bump profile exp(-1/(1 - r^2)) for |r| < 1, 0 outside: the standard
// smooth compactly supported mollifier shape (unnormalized).
double mollifier_profile(double r);

// Kernel of the mollifier at scale t, renormalized per center so that
// sum_j K(i,j) w_j = 1 exactly for every i (row-stochastic in the weighted
// sense).  K(i,j) is supported on dist(i,j) < t.
Eigen::MatrixXd mollifier_kernel(const Domain& dom, double t);

// Default dyadic scale family {2h, ..., <= length/2} for mollification.
std::vector<double> default_mollifier_scales(const Domain& dom);

// Default ball family for oscillation measures: every node as center, dyadic
// radii {2h, ..., <= diameter/2}.
std::vector<Ball> default_ball_family(const Domain& dom);

// Weighted mean of f over the members of a ball.
double ball_mean(const ScalarField& f, const Ball& ball);

// BMO-type seminorm: sup over the ball family of
//   t^{-n} sum_{j in B(x,t)} |f_j - mean_B f| w_j.
double bmo_seminorm(const ScalarField& f);
double bmo_seminorm(const ScalarField& f, const std::vector<Ball>& family);

// Hardy-type norm: || sup_t |kappa_t * f| ||_{L^1}, the maximal smoothing
// over the scale family integrated over the domain.
double hardy_norm(const ScalarField& f);
double hardy_norm(const ScalarField& f, const std::vector<double>& scales);

// Centered maximal function: per node the largest weighted average of |f|
// over the dyadic balls around it (the family extends past the diameter so
// the global average is always a candidate).
ScalarField maximal_function(const ScalarField& f);

// Worst ratio, over the default ball family, of the scale-adjusted
// oscillation t^{-s} |f_i - mean_B f| to the local tail functional
//   ( sum_{j in B, j != i} |f_i - f_j|^p w_j / d_ij^(n+sp) )^(1/p).
// Ratios with denominator below 1e-14 are skipped; 0 if all are.
double maximal_oscillation_check(const ScalarField& f, double s, double p);

// Least-squares projection onto ker(div_s) in the pair inner product
// weighted by w_i w_j / d_ij^n: subtracts d_s(lambda) where the multiplier
// solves the (dense, symmetrized) normal equations div_s(d_s lambda) =
// div_s F.  Constants are quotiented out; throws NumericalError if the
// normal system is singular beyond that (degenerate domains).
OffDiagField divfree_project(const OffDiagField& f, double s);

// Weighted three-term pairing sum_i phi_i <F, d_s g>(i) w_i: the div-curl
// quantity tested against products of norms.
double divcurl_pairing(const ScalarField& phi, const OffDiagField& f,
                       const ScalarField& g, double s);

// Solve the fractional Poisson problem (-D)^s u = rhs for the mean-zero u
// (dense symmetric solve).  Requires |mean(rhs)| <= 1e-10 * ||rhs||_L2.
ScalarField solve_fractional_poisson(const ScalarField& rhs, double s);

struct TrialOutcome {
  int trial = 0;
  double ratio = 0;
  double localized_ratio = 0;  // divcurl only: window-restricted norms
  int center = 0;              // divcurl only: bump placement
  double radius = 0;           // divcurl only: bump scale
  bool skipped = false;        // degenerate denominator
};

struct ExperimentStats {
  std::vector<TrialOutcome> trials;
  int skipped = 0;
  double max_ratio = 0;
  double median_ratio = 0;
  double q90_ratio = 0;
};

// Randomized div-curl constant probe: per trial draw a divergence-free F
// (smooth band-limited two-point field, projected), a band-limited g and a
// random bump phi (continuum-drawn center, radius in {L/16, L/8, L/4}), and
// record
//   |divcurl_pairing| / (( [phi]_BMO + r^{-n} ||phi||_L1 )
//                        * ||F||_p * ||d_s g||_p'),
// plus the variant with both field norms restricted to the window
// B(center, lambda * r).  Deterministic per (seed, trial index), and the
// draw is independent of the node count, so a trial probes the same
// underlying data at every refinement level.
ExperimentStats divcurl_constant_experiment(const DomainPtr& dom, int trials,
                                            double s, double p,
                                            std::uint64_t seed,
                                            double lambda = 4.0,
                                            int threads = 1);

// Randomized stability probe of the critical-exponent Poisson solve: with
// divergence-free F and band-limited g (mesh-independent draws as above),
// solve (-D)^s u = <F, d_s g> and record ||u||_inf / (||F||_2 ||d_s g||_2).
// 1D domains (s plays n/2).
ExperimentStats wente_experiment(const DomainPtr& dom, int trials, double s,
                                 std::uint64_t seed, int threads = 1);

}  // namespace fdc
