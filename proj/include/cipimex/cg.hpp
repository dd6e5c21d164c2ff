#pragma once

#include <cstddef>
#include <span>

#include "cipimex/sparse.hpp"

namespace cipimex {

enum class Preconditioner { none, jacobi };

struct CgOptions {
  double tol_rel = 1e-10;
  std::size_t max_iter = 1000;
  Preconditioner preconditioner = Preconditioner::jacobi;
};

struct CgResult {
  Vector x;
  std::size_t iterations = 0;
  double initial_residual = 0.0;  // ||b - A x0||
  double final_residual = 0.0;    // ||b - A x||
};

/// Preconditioned conjugate gradients for SPD A. Stops once
/// ||b - A x|| <= tol_rel ||b||; throws NonConvergence after max_iter.
/// `x0` is the initial guess (zero if empty).
CgResult cg_solve(const SparseMatrix& A, std::span<const double> b, const CgOptions& options = {},
                  std::span<const double> x0 = {});

/// Same as cg_solve with a caller-supplied inverse diagonal (cached Jacobi).
CgResult cg_solve(const SparseMatrix& A, std::span<const double> b, std::span<const double> inv_diag,
                  const CgOptions& options, std::span<const double> x0 = {});

}  // namespace cipimex
