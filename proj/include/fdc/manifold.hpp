#pragma once

#include <cstdint>

#include "fdc/fields.hpp"

namespace fdc {

// Node-wise map into the unit sphere S^{N-1}: a VectorMap whose rows are
// unit length (validated to 1e-10 on construction).
struct SphereMap {
  VectorMap map;

  SphereMap() = default;
  explicit SphereMap(VectorMap m);

  const DomainPtr& dom() const { return map.dom; }
  int size() const { return map.size(); }
  int target_dim() const { return map.target_dim(); }
};

// Row-wise nearest-point projection v -> v/|v|.  Rejects rows shorter
// than 1e-12.
SphereMap project_sphere(const VectorMap& u);

// Orthogonal projection of w onto the tangent space of the sphere at p
// (|p| = 1 required to 1e-10): w - <w,p> p.
Eigen::VectorXd tangent_project(const Eigen::VectorXd& p, const Eigen::VectorXd& w);

// Standard basis of antisymmetric N x N matrices A_{ab} = e_a e_b^T - e_b e_a^T,
// a < b in lexicographic order; the infinitesimal rotations of R^N.  The
// induced tangent fields X_g(p) = A_g p satisfy, exactly in exact arithmetic,
//   sum_g X_g(p) X_g(p)^T = I - p p^T          (|p| = 1)
//   <A_g (p - q), p - q> = 0                   (any p, q).
class KillingBasis {
 public:
  explicit KillingBasis(int n);  // n >= 2

  int ambient_dim() const { return n_; }
  int count() const { return n_ * (n_ - 1) / 2; }

  Eigen::MatrixXd generator(int g) const;
  // X_g(p) = A_g p without forming the matrix.
  Eigen::VectorXd apply(int g, const Eigen::VectorXd& p) const;

 private:
  int n_;
};

// Numerical residual of the projection identity above: max over `trials`
// random unit vectors p of the max-abs entry of
// sum_g (A_g p)(A_g p)^T - (I - p p^T).
double killing_projection_identity(int n, int trials = 32,
                                   std::uint64_t seed = 0);

// Max over random pairs (p, q) of |<A_g (p - q), p - q>| across generators.
double killing_pointwise_property(int n, int trials = 32,
                                  std::uint64_t seed = 0);

struct TangencyReport {
  double max_ratio = 0;
  double mean_ratio = 0;
  int pairs = 0;  // admissible pairs (|u_i - u_j| above threshold)
};

// For every ordered pair with |u_i - u_j| >= 1e-10, the ratio
//   |(I - P(u_j))(u_i - u_j)| / |u_i - u_j|^2,
// where P(p) = I - p p^T projects onto the tangent space at u_j: the
// normal defect of a chord relative to its squared length (identically 1/2
// on the unit sphere).  Errors if no pair is admissible (constant map).
TangencyReport tangency_defect(const SphereMap& u);

}  // namespace fdc
