#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace fdc {

enum class Topology { Torus, Box };

// Finite set of weighted nodes with pairwise distances.  All nonlocal
// operators in this library are sums over these nodes; the weights play the
// role of the volume element and the distance matrix feeds every kernel.
//
// Nodes form a uniform axis-aligned lattice with spacing h = length / m per
// axis: x_i = i * h.  On the torus, distances use the minimal image per axis;
// on the truncated box they are plain Euclidean.  Weights are uniformly h^dim.
class Domain {
 public:
  // Direct constructor for arbitrary node sets (used by tests and tools that
  // need degenerate or tiny domains).  Validates only shape consistency.
  Domain(int dim, Topology topology, double length, Eigen::MatrixXd nodes,
         Eigen::VectorXd weights, Eigen::MatrixXd dist);

  int dim() const { return dim_; }
  Topology topology() const { return topology_; }
  double length() const { return length_; }
  int size() const { return static_cast<int>(weights_.size()); }

  const Eigen::MatrixXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::MatrixXd& dist() const { return dist_; }

  double volume() const { return weights_.sum(); }
  double diameter() const;
  // Smallest nonzero pairwise distance (lattice spacing for built domains).
  double min_spacing() const;

  // Matrix with entries dist(i,j)^(-e) off the diagonal and 0 on it.
  // Memoized per exponent (iterative solvers request the same kernel every
  // step); safe for concurrent callers.
  const Eigen::MatrixXd& inv_dist_pow(double e) const;

 private:
  int dim_;
  Topology topology_;
  double length_;
  Eigen::MatrixXd nodes_;    // M x dim
  Eigen::VectorXd weights_;  // M
  Eigen::MatrixXd dist_;     // M x M, symmetric, zero diagonal
  mutable std::mutex cache_mutex_;
  mutable std::map<double, Eigen::MatrixXd> pow_cache_;
};

using DomainPtr = std::shared_ptr<const Domain>;

// Uniform lattice with m nodes per axis on [0, length)^dim (torus) or
// [0, length) sampled at lattice points (box).  Requires dim in {1, 2},
// m >= 4, length > 0.
DomainPtr build_domain(int dim, Topology topology, int nodes_per_axis,
                       double length = 1.0);

struct Ball {
  int center = 0;
  double radius = 0.0;
};

// Indices j with dist(center, j) < radius; always contains the center.
std::vector<int> ball_members(const Domain& dom, const Ball& ball);

// Dyadic radii {2h, 4h, 8h, ...} not exceeding rmax (always at least {2h},
// h = min_spacing).  Default scale family for the averaging operators
// (ball means, mollifiers, maximal functions).
std::vector<double> dyadic_radii(const Domain& dom, double rmax);

}  // namespace fdc
