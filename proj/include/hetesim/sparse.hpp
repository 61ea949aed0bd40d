/*
 *   Copyright 2026 the hetesim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hetesim {

using Index = std::int64_t;

struct Coo {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

/// Compressed-sparse-row matrix of 64-bit floats.
///
/// Storage invariants (checked by `check_invariants`):
///   - column indices strictly increasing within each row,
///   - no stored explicit zeros,
///   - all values finite.
///
/// Adjacency and probability matrices additionally keep values >= 0;
/// that is the caller's contract, not enforced here.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols);

  static SparseMatrix identity(Index n);

  /// Builds from triplets. Duplicate (row, col) entries accumulate.
  /// The result is independent of the input order: triplets are sorted
  /// by (row, col, value) before summation, so duplicate weights are
  /// always added in the same order.
  static SparseMatrix from_coo(Index rows, Index cols, std::vector<Coo> entries);

  /// Builds directly from CSR arrays; caller guarantees the invariants.
  static SparseMatrix from_csr(Index rows, Index cols, std::vector<Index> row_ptr,
                               std::vector<Index> cols_idx, std::vector<double> vals);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(vals_.size()); }

  std::span<const Index> row_cols(Index r) const {
    return {cols_idx_.data() + row_ptr_[r], cols_idx_.data() + row_ptr_[r + 1]};
  }
  std::span<const double> row_vals(Index r) const {
    return {vals_.data() + row_ptr_[r], vals_.data() + row_ptr_[r + 1]};
  }
  Index row_nnz(Index r) const { return row_ptr_[r + 1] - row_ptr_[r]; }

  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_indices() const { return cols_idx_; }
  std::span<const double> values() const { return vals_; }

  /// Value at (r, c); zero when not stored. Binary search within the row.
  double at(Index r, Index c) const;

  SparseMatrix transposed() const;

  /// Rows scaled entrywise: out(r, :) = factors[r] * in(r, :).
  /// A zero factor drops the row's entries.
  SparseMatrix scaled_rows(std::span<const double> factors) const;
  SparseMatrix scaled_cols(std::span<const double> factors) const;

  /// New matrix with fn applied to every stored value (exact zeros produced
  /// by fn are dropped).
  SparseMatrix map_values(const std::function<double(double)>& fn) const;

  /// Drops entries with value < threshold (strict).
  SparseMatrix thresholded(double threshold) const;

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
  std::vector<double> row_l1_norms() const { return row_sums_abs(); }
  std::vector<double> row_l2_norms() const;

  std::vector<Coo> to_coo() const;

  bool same_shape(const SparseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool same_pattern(const SparseMatrix& other) const;

  /// max_{i,j} |this(i,j) - other(i,j)|; shapes must match.
  double max_abs_diff(const SparseMatrix& other) const;

  /// Throws ErrorKind::Internal when a storage invariant is broken.
  void check_invariants() const;

 private:
  std::vector<double> row_sums_abs() const;

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_ = {0};
  std::vector<Index> cols_idx_;
  std::vector<double> vals_;
};

/// a * b with dimension check. Parallelized by output row; the result is
/// bit-identical regardless of thread count.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

/// a * transpose(b); both operands keep their natural row orientation.
SparseMatrix multiply_abt(const SparseMatrix& a, const SparseMatrix& b);

/// Entrywise a + b; shapes must match.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b);

/// Sparse dot product of row `ra` of a with row `rb` of b.
double row_dot(const SparseMatrix& a, Index ra, const SparseMatrix& b, Index rb);

}  // namespace hetesim
