#pragma once

#include "fdc/fields.hpp"

namespace fdc {

// s-gradient: (d_s f)(i,j) = (f_i - f_j) / dist(i,j)^s for i != j.
// Requires s in (0,1).  The vector-map overload applies componentwise.
OffDiagField s_gradient(const ScalarField& f, double s);
OffDiagField s_gradient(const VectorMap& u, double s);

// Pointwise pairing of two-point fields:
//   <F,G>(i) = sum_{j != i} <F(i,j), G(i,j)> w_j / dist(i,j)^n.
ScalarField pairing(const OffDiagField& f, const OffDiagField& g);

// Local p-norm: <F,F> generalized to exponent p,
//   |F|_p(i) = ( sum_{j != i} |F(i,j)|^p w_j / dist(i,j)^n )^(1/p),  p >= 1.
ScalarField local_p_norm(const OffDiagField& f, double p);

// Global off-diagonal L^p norm,
//   ( sum_{i != j} |F(i,j)|^p w_i w_j / dist(i,j)^n )^(1/p),  p >= 1.
double offdiag_lp_norm(const OffDiagField& f, double p);

// Localized variant: the sum runs over ordered pairs with i or j inside the
// window ball (each ordered pair counted once).
double offdiag_lp_norm(const OffDiagField& f, double p, const Ball& window);

// Gagliardo seminorm [f]_{s,p} = offdiag L^p norm of the s-gradient.
double gagliardo_seminorm(const ScalarField& f, double s, double p);
double gagliardo_seminorm(const VectorMap& u, double s, double p);

// s-divergence, the exact adjoint of the s-gradient:
//   (div_s F)(k) = sum_{j != k} (F(k,j) - F(j,k)) w_j / dist(k,j)^(n+s),
// so that sum_k (div_s F)(k) phi(k) w_k = sum_{i != j} F(i,j) (d_s phi)(i,j)
// w_i w_j / dist(i,j)^n holds to machine precision.  Single-component F.
ScalarField s_divergence(const OffDiagField& f, double s);

// Same sum as s_divergence with every term replaced by its absolute value:
// the mass against which cancellation in div_s is measured (used to form
// honest relative residuals for conservation-law checks).
ScalarField s_divergence_abs(const OffDiagField& f, double s);

// Fractional Laplacian,
//   ((-D)^s f)(k) = sum_{j != k} (f_k - f_j) w_j / dist(k,j)^(n+2s).
// Composition law: div_s(d_s f) = 2 (-D)^s f (the ordered double sum counts
// every unordered pair twice).
ScalarField fractional_laplacian(const ScalarField& f, double s);

// Mixed-exponent seminorm,
//   ( sum_i w_i ( sum_{j != i} |f_i - f_j|^q w_j / dist(i,j)^(n+sq) )^(p/q) )^(1/p).
// Collapses to the Gagliardo seminorm when q == p.
double xspq_seminorm(const ScalarField& f, double s, double p, double q);

// Cancellation report for a family of divergence sums: `residual` is the
// worst sup-norm of div_s over the family, `scale` the worst mass of the
// same sums with absolute values (what the cancellation is measured against).
struct ConservationReport {
  double residual = 0;
  double scale = 0;
  std::vector<double> per_component;
};

}  // namespace fdc
