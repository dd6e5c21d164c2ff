#include "cipimex/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cipimex/errors.hpp"

namespace cipimex {

SparsityBuilder::SparsityBuilder(std::size_t rows, std::size_t cols)
    : cols_(cols), pattern_(rows), compacted_size_(rows, 0) {
  if (cols > std::numeric_limits<Index>::max()) throw InvalidArgument("SparsityBuilder: too many columns");
}

void SparsityBuilder::compact(std::size_t row) {
  auto& r = pattern_[row];
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  compacted_size_[row] = r.size();
}

void SparsityBuilder::add(std::size_t row, std::size_t col) {
  if (row >= pattern_.size() || col >= cols_) throw DimensionMismatch("SparsityBuilder::add out of range");
  auto& r = pattern_[row];
  r.push_back(static_cast<Index>(col));
  if (r.size() > 2 * compacted_size_[row] + 64) compact(row);
}

void SparsityBuilder::add_block(std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
  for (std::size_t i : rows) {
    for (std::size_t j : cols) add(i, j);
  }
}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix::SparseMatrix(SparsityBuilder builder) : rows_(builder.rows()), cols_(builder.cols()) {
  row_ptr_.assign(rows_ + 1, 0);
  for (std::size_t i = 0; i < rows_; ++i) {
    builder.compact(i);
    row_ptr_[i + 1] = row_ptr_[i] + builder.pattern_[i].size();
  }
  col_idx_.reserve(row_ptr_.back());
  for (std::size_t i = 0; i < rows_; ++i) {
    auto& r = builder.pattern_[i];
    col_idx_.insert(col_idx_.end(), r.begin(), r.end());
    std::vector<Index>().swap(r);
  }
  values_.assign(col_idx_.size(), 0.0);
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  const Vector ones(n, 1.0);
  return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> diag) {
  SparsityBuilder b(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) b.add(i, i);
  SparseMatrix m(std::move(b));
  for (std::size_t i = 0; i < diag.size(); ++i) m.values_[i] = diag[i];
  return m;
}

SparseMatrix SparseMatrix::from_dense(std::size_t rows, std::size_t cols, std::span<const double> values) {
  if (values.size() != rows * cols) throw DimensionMismatch("from_dense: size mismatch");
  SparsityBuilder b(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (values[i * cols + j] != 0.0) b.add(i, j);
    }
  }
  SparseMatrix m(std::move(b));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (values[i * cols + j] != 0.0) m.add(i, j, values[i * cols + j]);
    }
  }
  return m;
}

SparseMatrix SparseMatrix::from_csr(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                                    std::vector<Index> column_indices, std::vector<double> values) {
  if (row_offsets.size() != rows + 1 || row_offsets.front() != 0 || row_offsets.back() != column_indices.size() ||
      values.size() != column_indices.size()) {
    throw InvalidArgument("from_csr: inconsistent array sizes");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_offsets[i + 1] < row_offsets[i]) throw InvalidArgument("from_csr: decreasing row offsets");
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (column_indices[k] >= cols) throw InvalidArgument("from_csr: column out of range");
      if (k > row_offsets[i] && column_indices[k] <= column_indices[k - 1]) {
        throw InvalidArgument("from_csr: columns not sorted/unique in row " + std::to_string(i));
      }
    }
  }
  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_ = std::move(row_offsets);
  m.col_idx_ = std::move(column_indices);
  m.values_ = std::move(values);
  return m;
}

std::ptrdiff_t SparseMatrix::find(std::size_t i, std::size_t j) const {
  const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<Index>(j));
  if (it == end || *it != j) return -1;
  return it - col_idx_.begin();
}

void SparseMatrix::add(std::size_t i, std::size_t j, double v) {
  if (i >= rows_ || j >= cols_) throw DimensionMismatch("SparseMatrix::add out of range");
  const auto pos = find(i, j);
  if (pos < 0) {
    throw InvalidArgument("SparseMatrix::add: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") not in pattern");
  }
  values_[static_cast<std::size_t>(pos)] += v;
}

void SparseMatrix::add_block(std::span<const std::size_t> rows, std::span<const std::size_t> cols,
                             std::span<const double> block) {
  if (block.size() != rows.size() * cols.size()) throw DimensionMismatch("add_block: block size");
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) add(rows[a], cols[b], block[a * cols.size() + b]);
  }
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw DimensionMismatch("SparseMatrix::at out of range");
  const auto pos = find(i, j);
  return pos < 0 ? 0.0 : values_[static_cast<std::size_t>(pos)];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) {
    throw DimensionMismatch("spmv: matrix is " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                            ", x has " + std::to_string(x.size()) + ", y has " + std::to_string(y.size()));
  }
  const double* val = values_.data();
  const Index* col = col_idx_.data();
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

Vector SparseMatrix::operator*(std::span<const double> x) const {
  Vector y(rows_);
  multiply(x, y);
  return y;
}

Vector SparseMatrix::diagonal_entries() const {
  Vector d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

double SparseMatrix::quadratic_form(std::span<const double> x) const {
  const Vector y = *this * x;
  return dot(x, y);
}

double SparseMatrix::asymmetry() const {
  double max_entry = 0.0, max_diff = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t j = col_idx_[k];
      max_entry = std::max(max_entry, std::abs(values_[k]));
      max_diff = std::max(max_diff, std::abs(values_[k] - (j < rows_ && i < cols_ ? at(j, i) : 0.0)));
    }
  }
  return max_entry == 0.0 ? 0.0 : max_diff / max_entry;
}

void SparseMatrix::scale(double s) {
  for (double& v : values_) v *= s;
}

void SparseMatrix::eliminate_symmetric(std::span<const std::size_t> dofs) {
  std::vector<char> fixed(std::max(rows_, cols_), 0);
  for (std::size_t d : dofs) {
    if (d >= rows_ || d >= cols_) throw DimensionMismatch("eliminate_symmetric: dof out of range");
    fixed[d] = 1;
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t j = col_idx_[k];
      if (fixed[i] || fixed[j]) values_[k] = (i == j) ? 1.0 : 0.0;
    }
  }
  for (std::size_t d : dofs) {
    if (find(d, d) < 0) throw InvalidArgument("eliminate_symmetric: missing diagonal entry");
  }
}

SparseMatrix linear_combination(double a, const SparseMatrix& A, double b, const SparseMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw DimensionMismatch("linear_combination: shapes differ");
  // merge sorted rows
  std::vector<std::size_t> ptr(A.rows() + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(std::max(A.nnz(), B.nnz()));
  vals.reserve(std::max(A.nnz(), B.nnz()));
  const auto& ap = A.row_offsets();
  const auto& bp = B.row_offsets();
  const auto& ac = A.column_indices();
  const auto& bc = B.column_indices();
  const auto& av = A.values();
  const auto& bv = B.values();
  for (std::size_t i = 0; i < A.rows(); ++i) {
    std::size_t ka = ap[i], kb = bp[i];
    while (ka < ap[i + 1] || kb < bp[i + 1]) {
      if (kb == bp[i + 1] || (ka < ap[i + 1] && ac[ka] < bc[kb])) {
        cols.push_back(ac[ka]);
        vals.push_back(a * av[ka++]);
      } else if (ka == ap[i + 1] || bc[kb] < ac[ka]) {
        cols.push_back(bc[kb]);
        vals.push_back(b * bv[kb++]);
      } else {
        cols.push_back(ac[ka]);
        vals.push_back(a * av[ka++] + b * bv[kb++]);
      }
    }
    ptr[i + 1] = cols.size();
  }
  return SparseMatrix::from_csr(A.rows(), A.cols(), std::move(ptr), std::move(cols), std::move(vals));
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace cipimex
