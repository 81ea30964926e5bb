#include "fdc/fields.hpp"

#include "fdc/rng.hpp"

namespace fdc {

ScalarField random_scalar_field(const DomainPtr& dom, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  ScalarField f(dom);
  for (int i = 0; i < f.size(); ++i) f.values[i] = gauss(rng);
  return f;
}

OffDiagField random_offdiag_field(const DomainPtr& dom, int comps,
                                  std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  OffDiagField f(dom, comps);
  const int m = f.size();
  for (int c = 0; c < comps; ++c)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j) f.comp(c)(i, j) = gauss(rng);
  return f;
}

VectorMap random_unit_map(const DomainPtr& dom, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  VectorMap u(dom, n);
  for (int i = 0; i < u.size(); ++i) {
    Eigen::RowVectorXd row(n);
    do {
      for (int k = 0; k < n; ++k) row[k] = gauss(rng);
    } while (row.norm() < 1e-12);
    u.values.row(i) = row / row.norm();
  }
  return u;
}

MatrixOffDiagField random_antisym_matrix_field(const DomainPtr& dom, int n,
                                               std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  MatrixOffDiagField f(dom, n);
  const int m = f.size();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c) {
          double v = gauss(rng);
          a(r, c) = v;
          a(c, r) = -v;
        }
      f.set_pair(i, j, a);
    }
  return f;
}

}  // namespace fdc
