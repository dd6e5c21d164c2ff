#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cipimex {

using Vector = std::vector<double>;
using Index = std::uint32_t;

/// Collects the nonzero structure row by row before the CSR arrays are fixed.
class SparsityBuilder {
public:
  SparsityBuilder(std::size_t rows, std::size_t cols);

  /// Couples every row in `rows` with every column in `cols`.
  void add_block(std::span<const std::size_t> rows, std::span<const std::size_t> cols);
  void add(std::size_t row, std::size_t col);

  std::size_t rows() const { return pattern_.size(); }
  std::size_t cols() const { return cols_; }

private:
  friend class SparseMatrix;
  void compact(std::size_t row);

  std::size_t cols_;
  std::vector<std::vector<Index>> pattern_;
  std::vector<std::size_t> compacted_size_;
};

/// Compressed sparse row matrix. Column indices are sorted and unique per row.
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);  // all-zero, empty pattern
  explicit SparseMatrix(SparsityBuilder builder);     // pattern with zero values

  static SparseMatrix identity(std::size_t n);
  static SparseMatrix diagonal(std::span<const double> diag);
  /// Dense row-major input; exact zeros are dropped.
  static SparseMatrix from_dense(std::size_t rows, std::size_t cols, std::span<const double> values);
  /// Takes raw CSR arrays; throws InvalidArgument unless columns are sorted,
  /// unique and in range.
  static SparseMatrix from_csr(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                               std::vector<Index> column_indices, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const { return row_ptr_; }
  const std::vector<Index>& column_indices() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Accumulates into an existing pattern entry; throws if (i, j) is not stored.
  void add(std::size_t i, std::size_t j, double v);
  /// Accumulates a dense local block (row-major, rows.size() x cols.size()).
  void add_block(std::span<const std::size_t> rows, std::span<const std::size_t> cols,
                 std::span<const double> block);

  /// Stored value, or 0 when (i, j) is outside the pattern.
  double at(std::size_t i, std::size_t j) const;

  /// y = A x. Throws DimensionMismatch.
  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;

  Vector diagonal_entries() const;

  /// x^T A x
  double quadratic_form(std::span<const double> x) const;

  /// Largest |A_ij - A_ji| relative to the largest |A_ij|.
  double asymmetry() const;

  void scale(double s);

  /// Fixes the rows/columns of `dofs`: unit diagonal, zero off-diagonals in
  /// those rows and columns.
  void eliminate_symmetric(std::span<const std::size_t> dofs);

private:
  std::ptrdiff_t find(std::size_t i, std::size_t j) const;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// a*A + b*B on the union of both patterns.
SparseMatrix linear_combination(double a, const SparseMatrix& A, double b, const SparseMatrix& B);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y += a x
void axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace cipimex
