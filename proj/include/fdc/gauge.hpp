#pragma once

#include <utility>
#include <vector>

#include "fdc/fracops.hpp"
#include "fdc/solver.hpp"

namespace fdc {

// One rotation matrix P(x) in SO(N) per node (orthogonality checked to
// 1e-10, positive determinant required).
struct GaugeField {
  DomainPtr dom;
  std::vector<Eigen::MatrixXd> rotations;

  GaugeField() = default;
  GaugeField(DomainPtr d, std::vector<Eigen::MatrixXd> r);

  static GaugeField identity(DomainPtr d, int n);

  int size() const { return static_cast<int>(rotations.size()); }
  int matrix_dim() const {
    return rotations.empty() ? 0 : static_cast<int>(rotations[0].rows());
  }
  double orthogonality_defect() const;  // max |P^T P - I| entry over nodes
};

// Exponential of an antisymmetric matrix: closed form for N = 2, Rodrigues
// for N = 3, scaling-and-squaring Pade for larger N.  Exactly orthogonal up
// to rounding, so repeated retractions do not drift off SO(N).
Eigen::MatrixXd so_exponential(const Eigen::MatrixXd& a);

// Gauge alignment functional
//   F(P) = sum_{i != j} | (P_i - P_j)/d_ij^s - P_i W_ij |_F^2 w_i w_j / d_ij^n
// for a connection form W (per-pair antisymmetric matrices, checked to 1e-10).
double gauge_energy(const GaugeField& p, const MatrixOffDiagField& omega, double s);

// Riemannian gradient of F in the left trivialization: per node an
// antisymmetric matrix G_k with dF/dt = sum_k <G_k, a_k>_F w_k for the
// variation P_k(t) = exp(t a_k) P_k.
std::vector<Eigen::MatrixXd> gauge_gradient(const GaugeField& p,
                                            const MatrixOffDiagField& omega,
                                            double s);

// Gradient descent on SO(N)^M from P == identity with Armijo backtracking
// and exponential retraction.  In the returned report, `el_residual` is the
// final Riemannian gradient sup-norm max_k |G_k|_F.
std::pair<GaugeField, SolveReport> solve_gauge(const MatrixOffDiagField& omega,
                                               double s,
                                               const SolverConfig& cfg = {});

// Gauged connection form
//   W^P(x,y) = (1/2) ( d_sP(x,y) (P(y)^T + P(x)^T)
//                      - P(x) W(x,y) P(y)^T - P(y) W(x,y) P(x)^T ),
// the antisymmetric-W specialization.  Entries antisymmetric to 1e-10
// whenever P is orthogonal to that accuracy.
MatrixOffDiagField omega_p(const GaugeField& p, const MatrixOffDiagField& omega,
                           double s);

// General form, valid without antisymmetry of W: the last term becomes
// + P(y) W(x,y)^T P(x)^T.  Coincides with omega_p when W is antisymmetric.
MatrixOffDiagField omega_p_general(const GaugeField& p,
                                   const MatrixOffDiagField& omega, double s);

// Divergence cancellation of the gauged form: max over independent entries
// (r < c) of sup |div_s (W^P)_{rc}|, with the absolute-value mass as scale.
// Zero (to rounding) exactly at critical points of the gauge energy.
ConservationReport gauge_conservation_residual(const GaugeField& p,
                                               const MatrixOffDiagField& omega,
                                               double s);

}  // namespace fdc
