#pragma once

#include <span>
#include <vector>

#include "cipimex/sparse.hpp"

namespace cipimex {

/// SPD system with strongly imposed values on a DOF subset. Rows and columns
/// of the fixed DOFs are eliminated (unit diagonal); their couplings move to
/// the right-hand side.
class DirichletSystem {
public:
  DirichletSystem(SparseMatrix matrix, std::span<const std::size_t> fixed_dofs);

  const SparseMatrix& matrix() const { return eliminated_; }
  const Vector& inverse_diagonal() const { return inv_diag_; }

  /// load - K * fixed on free rows, fixed values on fixed rows. `fixed` is read
  /// only at the fixed DOFs.
  Vector rhs(std::span<const double> load, std::span<const double> fixed) const;

private:
  SparseMatrix coupling_;    // original columns of the fixed DOFs, free rows only
  SparseMatrix eliminated_;
  std::vector<std::size_t> fixed_;
  Vector inv_diag_;
};

}  // namespace cipimex
