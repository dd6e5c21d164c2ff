#include "cipimex/cg.hpp"

#include <cmath>
#include <string>

#include "cipimex/errors.hpp"

namespace cipimex {

CgResult cg_solve(const SparseMatrix& A, std::span<const double> b, const CgOptions& options,
                  std::span<const double> x0) {
  Vector inv_diag;
  if (options.preconditioner == Preconditioner::jacobi) {
    inv_diag = A.diagonal_entries();
    for (double& d : inv_diag) {
      if (!(d > 0.0)) throw InvalidArgument("cg_solve: Jacobi needs a positive diagonal");
      d = 1.0 / d;
    }
  }
  return cg_solve(A, b, inv_diag, options, x0);
}

CgResult cg_solve(const SparseMatrix& A, std::span<const double> b, std::span<const double> inv_diag,
                  const CgOptions& options, std::span<const double> x0) {
  const std::size_t n = b.size();
  if (A.rows() != n || A.cols() != n) throw DimensionMismatch("cg_solve: matrix/rhs size mismatch");
  if (!x0.empty() && x0.size() != n) throw DimensionMismatch("cg_solve: initial guess size mismatch");
  if (!inv_diag.empty() && inv_diag.size() != n) throw DimensionMismatch("cg_solve: preconditioner size mismatch");

  CgResult result;
  result.x.assign(n, 0.0);
  const double b_norm = norm2(b);
  if (b_norm == 0.0) return result;
  if (!x0.empty()) result.x.assign(x0.begin(), x0.end());

  Vector r(b.begin(), b.end());
  Vector q(n);
  if (!x0.empty()) {
    A.multiply(result.x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] -= q[i];
  }
  double r_norm = norm2(r);
  result.initial_residual = r_norm;
  result.final_residual = r_norm;
  const double target = options.tol_rel * b_norm;
  if (r_norm <= target) return result;

  auto precondition = [&](const Vector& in, Vector& out) {
    if (inv_diag.empty()) {
      out = in;
    } else {
      for (std::size_t i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
    }
  };

  Vector z(n), p(n);
  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    A.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      throw NonConvergence("cg_solve: matrix is not positive definite (p'Ap = " + std::to_string(pq) + ")",
                           r_norm / (b_norm > 0.0 ? b_norm : 1.0), it);
    }
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      result.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    r_norm = norm2(r);
    result.iterations = it;
    result.final_residual = r_norm;
    if (r_norm <= target) return result;
    precondition(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw NonConvergence("cg_solve: no convergence in " + std::to_string(options.max_iter) +
                           " iterations (relative residual " + std::to_string(r_norm / b_norm) + ")",
                       r_norm / b_norm, options.max_iter);
}

}  // namespace cipimex
