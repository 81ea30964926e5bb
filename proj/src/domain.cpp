#include "fdc/domain.hpp"

#include <cmath>
#include <limits>

#include "fdc/errors.hpp"

namespace fdc {

Domain::Domain(int dim, Topology topology, double length, Eigen::MatrixXd nodes,
               Eigen::VectorXd weights, Eigen::MatrixXd dist)
    : dim_(dim),
      topology_(topology),
      length_(length),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)),
      dist_(std::move(dist)) {
  const auto m = nodes_.rows();
  require(dim_ >= 1, "domain: dim must be positive");
  require(nodes_.cols() == dim_, "domain: node coordinates must match dim");
  require(weights_.size() == m, "domain: one weight per node required");
  require(dist_.rows() == m && dist_.cols() == m,
          "domain: distance matrix must be M x M");
  require((weights_.array() > 0).all(), "domain: weights must be positive");
}

double Domain::diameter() const { return dist_.maxCoeff(); }

double Domain::min_spacing() const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j)
      if (i != j && dist_(i, j) < best) best = dist_(i, j);
  return best;
}

const Eigen::MatrixXd& Domain::inv_dist_pow(double e) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = pow_cache_.find(e);
  if (it != pow_cache_.end()) return it->second;
  Eigen::MatrixXd w = dist_;
  w.diagonal().setOnes();  // placeholder, zeroed below
  w = w.array().pow(-e).matrix();
  w.diagonal().setZero();
  return pow_cache_.emplace(e, std::move(w)).first->second;
}

DomainPtr build_domain(int dim, Topology topology, int nodes_per_axis,
                       double length) {
  require(dim == 1 || dim == 2, "build_domain: dim must be 1 or 2");
  require(nodes_per_axis >= 4, "build_domain: need at least 4 nodes per axis");
  require(length > 0, "build_domain: length must be positive");

  const int m = nodes_per_axis;
  const double h = length / m;
  const int M = (dim == 1) ? m : m * m;

  Eigen::MatrixXd nodes(M, dim);
  if (dim == 1) {
    for (int i = 0; i < m; ++i) nodes(i, 0) = i * h;
  } else {
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        nodes(a * m + b, 0) = a * h;
        nodes(a * m + b, 1) = b * h;
      }
  }

  Eigen::VectorXd weights = Eigen::VectorXd::Constant(M, std::pow(h, dim));

  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j) {
      double d2 = 0;
      for (int k = 0; k < dim; ++k) {
        double delta = std::abs(nodes(i, k) - nodes(j, k));
        if (topology == Topology::Torus) delta = std::min(delta, length - delta);
        d2 += delta * delta;
      }
      dist(i, j) = dist(j, i) = std::sqrt(d2);
    }

  return std::make_shared<Domain>(dim, topology, length, std::move(nodes),
                                  std::move(weights), std::move(dist));
}

std::vector<int> ball_members(const Domain& dom, const Ball& ball) {
  require(ball.center >= 0 && ball.center < dom.size(),
          "ball_members: center out of range");
  require(ball.radius > 0, "ball_members: radius must be positive");
  std::vector<int> out;
  for (int j = 0; j < dom.size(); ++j)
    if (dom.dist()(ball.center, j) < ball.radius) out.push_back(j);
  return out;
}

std::vector<double> dyadic_radii(const Domain& dom, double rmax) {
  const double h = dom.min_spacing();
  std::vector<double> radii{2 * h};
  while (radii.back() * 2 <= rmax * (1 + 1e-12)) radii.push_back(radii.back() * 2);
  return radii;
}

}  // namespace fdc
