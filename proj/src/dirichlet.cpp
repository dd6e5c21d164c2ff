#include "cipimex/dirichlet.hpp"

#include "cipimex/errors.hpp"

namespace cipimex {

DirichletSystem::DirichletSystem(SparseMatrix matrix, std::span<const std::size_t> fixed_dofs)
    : fixed_(fixed_dofs.begin(), fixed_dofs.end()) {
  if (matrix.rows() != matrix.cols()) throw DimensionMismatch("DirichletSystem: matrix must be square");
  const std::size_t n = matrix.rows();
  std::vector<char> is_fixed(n, 0);
  for (std::size_t d : fixed_) {
    if (d >= n) throw DimensionMismatch("DirichletSystem: fixed DOF out of range");
    is_fixed[d] = 1;
  }

  if (!fixed_.empty()) {
    std::vector<std::size_t> ptr(n + 1, 0);
    std::vector<Index> cols;
    std::vector<double> vals;
    const auto& rp = matrix.row_offsets();
    const auto& ci = matrix.column_indices();
    const auto& v = matrix.values();
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_fixed[i]) {
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
          if (is_fixed[ci[k]]) {
            cols.push_back(ci[k]);
            vals.push_back(v[k]);
          }
        }
      }
      ptr[i + 1] = cols.size();
    }
    coupling_ = SparseMatrix::from_csr(n, n, std::move(ptr), std::move(cols), std::move(vals));
  }

  matrix.eliminate_symmetric(fixed_);
  eliminated_ = std::move(matrix);
  inv_diag_ = eliminated_.diagonal_entries();
  for (double& d : inv_diag_) {
    if (!(d > 0.0)) throw InvalidArgument("DirichletSystem: non-positive diagonal");
    d = 1.0 / d;
  }
}

Vector DirichletSystem::rhs(std::span<const double> load, std::span<const double> fixed) const {
  const std::size_t n = eliminated_.rows();
  if (load.size() != n || fixed.size() != n) throw DimensionMismatch("DirichletSystem::rhs: length");
  Vector r(load.begin(), load.end());
  if (fixed_.empty()) return r;
  Vector g(n, 0.0);
  for (std::size_t d : fixed_) g[d] = fixed[d];
  const Vector kg = coupling_ * g;
  for (std::size_t i = 0; i < n; ++i) r[i] -= kg[i];
  for (std::size_t d : fixed_) r[d] = fixed[d];
  return r;
}

}  // namespace cipimex
