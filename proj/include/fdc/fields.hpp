#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "fdc/domain.hpp"
#include "fdc/errors.hpp"

namespace fdc {

// One real value per node.
struct ScalarField {
  DomainPtr dom;
  Eigen::VectorXd values;

  ScalarField() = default;
  explicit ScalarField(DomainPtr d)
      : dom(std::move(d)), values(Eigen::VectorXd::Zero(dom->size())) {}
  ScalarField(DomainPtr d, Eigen::VectorXd v)
      : dom(std::move(d)), values(std::move(v)) {
    require(values.size() == dom->size(), "scalar field: size mismatch");
  }

  int size() const { return static_cast<int>(values.size()); }
  double mean() const {  // weighted by node volumes
    return values.dot(dom->weights()) / dom->volume();
  }
};

// One R^N value per node (row i = value at node i).
struct VectorMap {
  DomainPtr dom;
  Eigen::MatrixXd values;  // M x N

  VectorMap() = default;
  VectorMap(DomainPtr d, int n)
      : dom(std::move(d)), values(Eigen::MatrixXd::Zero(dom->size(), n)) {}
  VectorMap(DomainPtr d, Eigen::MatrixXd v)
      : dom(std::move(d)), values(std::move(v)) {
    require(values.rows() == dom->size(), "vector map: size mismatch");
  }

  int size() const { return static_cast<int>(values.rows()); }
  int target_dim() const { return static_cast<int>(values.cols()); }
};

// Value on each ordered pair of distinct nodes ("off-diagonal" field): the
// discrete analogue of a two-point function F(x, y).  Stored as one M x M
// matrix per component with an identically zero diagonal; no relation between
// F(i,j) and F(j,i) is imposed.
class OffDiagField {
 public:
  OffDiagField() = default;
  OffDiagField(DomainPtr dom, int comps)
      : dom_(std::move(dom)),
        data_(static_cast<size_t>(comps),
              Eigen::MatrixXd::Zero(dom_->size(), dom_->size())) {
    require(comps >= 1, "offdiag field: need at least one component");
  }

  const DomainPtr& dom() const { return dom_; }
  int comps() const { return static_cast<int>(data_.size()); }
  int size() const { return dom_ ? dom_->size() : 0; }

  Eigen::MatrixXd& comp(int c) { return data_[static_cast<size_t>(c)]; }
  const Eigen::MatrixXd& comp(int c) const { return data_[static_cast<size_t>(c)]; }

  // Squared Euclidean length across components per pair (zero diagonal).
  Eigen::MatrixXd norm_sq() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(size(), size());
    for (const auto& m : data_) out.array() += m.array().square();
    out.diagonal().setZero();
    return out;
  }

  void zero_diagonal() {
    for (auto& m : data_) m.diagonal().setZero();
  }

 private:
  DomainPtr dom_;
  std::vector<Eigen::MatrixXd> data_;
};

// N x N matrix on each ordered pair of distinct nodes.  Entry (r, c) of the
// pair matrices is stored as one M x M sheet, so scalar per-entry operators
// (e.g. the s-divergence) apply sheet-wise.
class MatrixOffDiagField {
 public:
  MatrixOffDiagField() = default;
  MatrixOffDiagField(DomainPtr dom, int n)
      : n_(n), field_(std::move(dom), n * n) {
    require(n >= 2, "matrix offdiag field: matrix dimension must be >= 2");
  }

  const DomainPtr& dom() const { return field_.dom(); }
  int matrix_dim() const { return n_; }
  int size() const { return field_.size(); }

  Eigen::MatrixXd& entry(int r, int c) { return field_.comp(r * n_ + c); }
  const Eigen::MatrixXd& entry(int r, int c) const { return field_.comp(r * n_ + c); }

  Eigen::MatrixXd pair_matrix(int i, int j) const {
    Eigen::MatrixXd m(n_, n_);
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c) m(r, c) = entry(r, c)(i, j);
    return m;
  }
  void set_pair(int i, int j, const Eigen::MatrixXd& m) {
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c) entry(r, c)(i, j) = m(r, c);
  }

  // Largest |A + A^T| entry over all pairs: 0 for pointwise antisymmetry.
  double antisymmetry_defect() const {
    double worst = 0;
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c <= r; ++c) {
        double v = (entry(r, c) + entry(c, r)).array().abs().maxCoeff();
        worst = std::max(worst, v);
      }
    return worst;
  }

  // Frobenius norm squared across matrix entries per pair (zero diagonal).
  Eigen::MatrixXd norm_sq() const { return field_.norm_sq(); }

  const OffDiagField& as_offdiag() const { return field_; }

 private:
  int n_ = 0;
  OffDiagField field_;
};

inline void require_same_domain(const DomainPtr& a, const DomainPtr& b,
                                const char* what) {
  require(a && b && a == b, std::string(what) + ": fields must share one domain");
}

}  // namespace fdc
