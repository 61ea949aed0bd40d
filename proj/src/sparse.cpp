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

#include "hetesim/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetesim/errors.hpp"
#include "hetesim/parallel.hpp"

namespace hetesim {

SparseMatrix::SparseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) raise(ErrorKind::InvalidArgument, "negative matrix dimension");
  row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
}

SparseMatrix SparseMatrix::identity(Index n) {
  SparseMatrix m(n, n);
  m.cols_idx_.resize(n);
  m.vals_.assign(n, 1.0);
  std::iota(m.cols_idx_.begin(), m.cols_idx_.end(), Index{0});
  std::iota(m.row_ptr_.begin(), m.row_ptr_.end(), Index{0});
  return m;
}

SparseMatrix SparseMatrix::from_coo(Index rows, Index cols, std::vector<Coo> entries) {
  SparseMatrix m(rows, cols);
  for (const Coo& e : entries) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      raise(ErrorKind::InvalidArgument, "triplet index out of range");
    if (!std::isfinite(e.value)) raise(ErrorKind::InvalidArgument, "non-finite triplet value");
  }
  // Sorting by value as the last key pins the summation order of
  // duplicates, so permuted inputs produce identical floats.
  std::sort(entries.begin(), entries.end(), [](const Coo& x, const Coo& y) {
    if (x.row != y.row) return x.row < y.row;
    if (x.col != y.col) return x.col < y.col;
    return x.value < y.value;
  });
  m.cols_idx_.reserve(entries.size());
  m.vals_.reserve(entries.size());
  std::size_t i = 0;
  for (Index r = 0; r < rows; ++r) {
    while (i < entries.size() && entries[i].row == r) {
      Index c = entries[i].col;
      double v = 0.0;
      while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
        v += entries[i].value;
        ++i;
      }
      if (v != 0.0) {
        m.cols_idx_.push_back(c);
        m.vals_.push_back(v);
      }
    }
    m.row_ptr_[r + 1] = static_cast<Index>(m.vals_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::from_csr(Index rows, Index cols, std::vector<Index> row_ptr,
                                    std::vector<Index> cols_idx, std::vector<double> vals) {
  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_ = std::move(row_ptr);
  m.cols_idx_ = std::move(cols_idx);
  m.vals_ = std::move(vals);
  return m;
}

double SparseMatrix::at(Index r, Index c) const {
  auto cols = row_cols(r);
  auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return vals_[row_ptr_[r] + (it - cols.begin())];
}

SparseMatrix SparseMatrix::transposed() const {
  SparseMatrix t(cols_, rows_);
  t.cols_idx_.resize(vals_.size());
  t.vals_.resize(vals_.size());
  std::vector<Index> count(cols_ + 1, 0);
  for (Index c : cols_idx_) ++count[c + 1];
  for (Index c = 0; c < cols_; ++c) count[c + 1] += count[c];
  t.row_ptr_.assign(count.begin(), count.end());
  std::vector<Index> cursor(count.begin(), count.end() - 1);
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      Index pos = cursor[cols_idx_[k]]++;
      t.cols_idx_[pos] = r;
      t.vals_[pos] = vals_[k];
    }
  }
  return t;
}

SparseMatrix SparseMatrix::scaled_rows(std::span<const double> factors) const {
  if (static_cast<Index>(factors.size()) != rows_)
    raise(ErrorKind::DimensionMismatch, "row factor count != rows");
  SparseMatrix out(rows_, cols_);
  out.cols_idx_.reserve(vals_.size());
  out.vals_.reserve(vals_.size());
  for (Index r = 0; r < rows_; ++r) {
    double f = factors[r];
    if (f != 0.0) {
      for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        double v = vals_[k] * f;
        if (v != 0.0) {
          out.cols_idx_.push_back(cols_idx_[k]);
          out.vals_.push_back(v);
        }
      }
    }
    out.row_ptr_[r + 1] = static_cast<Index>(out.vals_.size());
  }
  return out;
}

SparseMatrix SparseMatrix::scaled_cols(std::span<const double> factors) const {
  if (static_cast<Index>(factors.size()) != cols_)
    raise(ErrorKind::DimensionMismatch, "col factor count != cols");
  SparseMatrix out(rows_, cols_);
  out.cols_idx_.reserve(vals_.size());
  out.vals_.reserve(vals_.size());
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      double v = vals_[k] * factors[cols_idx_[k]];
      if (v != 0.0) {
        out.cols_idx_.push_back(cols_idx_[k]);
        out.vals_.push_back(v);
      }
    }
    out.row_ptr_[r + 1] = static_cast<Index>(out.vals_.size());
  }
  return out;
}

SparseMatrix SparseMatrix::map_values(const std::function<double(double)>& fn) const {
  SparseMatrix out(rows_, cols_);
  out.cols_idx_.reserve(vals_.size());
  out.vals_.reserve(vals_.size());
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      double v = fn(vals_[k]);
      if (v != 0.0) {
        out.cols_idx_.push_back(cols_idx_[k]);
        out.vals_.push_back(v);
      }
    }
    out.row_ptr_[r + 1] = static_cast<Index>(out.vals_.size());
  }
  return out;
}

SparseMatrix SparseMatrix::thresholded(double threshold) const {
  SparseMatrix out(rows_, cols_);
  out.cols_idx_.reserve(vals_.size());
  out.vals_.reserve(vals_.size());
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (vals_[k] >= threshold) {
        out.cols_idx_.push_back(cols_idx_[k]);
        out.vals_.push_back(vals_[k]);
      }
    }
    out.row_ptr_[r + 1] = static_cast<Index>(out.vals_.size());
  }
  return out;
}

std::vector<double> SparseMatrix::row_sums() const {
  std::vector<double> sums(rows_, 0.0);
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) sums[r] += vals_[k];
  return sums;
}

std::vector<double> SparseMatrix::row_sums_abs() const {
  std::vector<double> sums(rows_, 0.0);
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) sums[r] += std::abs(vals_[k]);
  return sums;
}

std::vector<double> SparseMatrix::col_sums() const {
  std::vector<double> sums(cols_, 0.0);
  for (std::size_t k = 0; k < vals_.size(); ++k) sums[cols_idx_[k]] += vals_[k];
  return sums;
}

std::vector<double> SparseMatrix::row_l2_norms() const {
  std::vector<double> norms(rows_, 0.0);
  for (Index r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += vals_[k] * vals_[k];
    norms[r] = std::sqrt(s);
  }
  return norms;
}

std::vector<Coo> SparseMatrix::to_coo() const {
  std::vector<Coo> out;
  out.reserve(vals_.size());
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      out.push_back({r, cols_idx_[k], vals_[k]});
  return out;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return same_shape(other) && row_ptr_ == other.row_ptr_ && cols_idx_ == other.cols_idx_;
}

double SparseMatrix::max_abs_diff(const SparseMatrix& other) const {
  if (!same_shape(other)) raise(ErrorKind::DimensionMismatch, "shape mismatch in max_abs_diff");
  double worst = 0.0;
  for (Index r = 0; r < rows_; ++r) {
    auto ca = row_cols(r), cb = other.row_cols(r);
    auto va = row_vals(r), vb = other.row_vals(r);
    std::size_t i = 0, j = 0;
    while (i < ca.size() || j < cb.size()) {
      if (j == cb.size() || (i < ca.size() && ca[i] < cb[j])) {
        worst = std::max(worst, std::abs(va[i]));
        ++i;
      } else if (i == ca.size() || cb[j] < ca[i]) {
        worst = std::max(worst, std::abs(vb[j]));
        ++j;
      } else {
        worst = std::max(worst, std::abs(va[i] - vb[j]));
        ++i;
        ++j;
      }
    }
  }
  return worst;
}

void SparseMatrix::check_invariants() const {
  if (static_cast<Index>(row_ptr_.size()) != rows_ + 1)
    raise(ErrorKind::Internal, "row_ptr size mismatch");
  if (row_ptr_.front() != 0 || row_ptr_.back() != nnz())
    raise(ErrorKind::Internal, "row_ptr bounds mismatch");
  for (Index r = 0; r < rows_; ++r) {
    if (row_ptr_[r] > row_ptr_[r + 1]) raise(ErrorKind::Internal, "row_ptr not monotone");
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (cols_idx_[k] < 0 || cols_idx_[k] >= cols_)
        raise(ErrorKind::Internal, "column index out of range");
      if (k > row_ptr_[r] && cols_idx_[k - 1] >= cols_idx_[k])
        raise(ErrorKind::Internal, "columns not strictly increasing");
      if (vals_[k] == 0.0) raise(ErrorKind::Internal, "stored explicit zero");
      if (!std::isfinite(vals_[k])) raise(ErrorKind::Internal, "non-finite value");
    }
  }
}

namespace {

// One output row of a*b via a dense accumulator with a touch list.
void accumulate_row(const SparseMatrix& a, const SparseMatrix& b, Index r,
                    std::vector<double>& acc, std::vector<Index>& touched,
                    std::vector<std::pair<Index, double>>& out) {
  touched.clear();
  auto acols = a.row_cols(r);
  auto avals = a.row_vals(r);
  for (std::size_t i = 0; i < acols.size(); ++i) {
    Index k = acols[i];
    double av = avals[i];
    auto bcols = b.row_cols(k);
    auto bvals = b.row_vals(k);
    for (std::size_t j = 0; j < bcols.size(); ++j) {
      Index c = bcols[j];
      if (acc[c] == 0.0) touched.push_back(c);
      acc[c] += av * bvals[j];
    }
  }
  std::sort(touched.begin(), touched.end());
  out.clear();
  out.reserve(touched.size());
  for (Index c : touched) {
    if (acc[c] != 0.0) out.emplace_back(c, acc[c]);
    acc[c] = 0.0;
  }
}

}  // namespace

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows())
    raise(ErrorKind::DimensionMismatch, "inner dimensions do not match");
  std::vector<std::vector<std::pair<Index, double>>> rows(a.rows());
  parallel_for(a.rows(), [&](Index begin, Index end) {
    std::vector<double> acc(b.cols(), 0.0);
    std::vector<Index> touched;
    std::vector<std::pair<Index, double>> row;
    for (Index r = begin; r < end; ++r) {
      accumulate_row(a, b, r, acc, touched, row);
      rows[r] = row;
    }
  });
  std::vector<Index> row_ptr(a.rows() + 1, 0);
  for (Index r = 0; r < a.rows(); ++r)
    row_ptr[r + 1] = row_ptr[r] + static_cast<Index>(rows[r].size());
  std::vector<Index> cols_idx(row_ptr.back());
  std::vector<double> vals(row_ptr.back());
  for (Index r = 0; r < a.rows(); ++r) {
    Index k = row_ptr[r];
    for (auto& [c, v] : rows[r]) {
      cols_idx[k] = c;
      vals[k] = v;
      ++k;
    }
  }
  return SparseMatrix::from_csr(a.rows(), b.cols(), std::move(row_ptr), std::move(cols_idx),
                                std::move(vals));
}

SparseMatrix multiply_abt(const SparseMatrix& a, const SparseMatrix& b) {
  return multiply(a, b.transposed());
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b) {
  if (!a.same_shape(b)) raise(ErrorKind::DimensionMismatch, "shape mismatch in add");
  std::vector<Index> row_ptr(a.rows() + 1, 0);
  std::vector<Index> cols_idx;
  std::vector<double> vals;
  cols_idx.reserve(a.nnz() + b.nnz());
  vals.reserve(a.nnz() + b.nnz());
  for (Index r = 0; r < a.rows(); ++r) {
    auto ca = a.row_cols(r), cb = b.row_cols(r);
    auto va = a.row_vals(r), vb = b.row_vals(r);
    std::size_t i = 0, j = 0;
    while (i < ca.size() || j < cb.size()) {
      Index c;
      double v;
      if (j == cb.size() || (i < ca.size() && ca[i] < cb[j])) {
        c = ca[i];
        v = va[i++];
      } else if (i == ca.size() || cb[j] < ca[i]) {
        c = cb[j];
        v = vb[j++];
      } else {
        c = ca[i];
        v = va[i++] + vb[j++];
      }
      if (v != 0.0) {
        cols_idx.push_back(c);
        vals.push_back(v);
      }
    }
    row_ptr[r + 1] = static_cast<Index>(vals.size());
  }
  return SparseMatrix::from_csr(a.rows(), a.cols(), std::move(row_ptr), std::move(cols_idx),
                                std::move(vals));
}

double row_dot(const SparseMatrix& a, Index ra, const SparseMatrix& b, Index rb) {
  if (a.cols() != b.cols()) raise(ErrorKind::DimensionMismatch, "row_dot column spaces differ");
  auto ca = a.row_cols(ra), cb = b.row_cols(rb);
  auto va = a.row_vals(ra), vb = b.row_vals(rb);
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ca.size() && j < cb.size()) {
    if (ca[i] < cb[j]) {
      ++i;
    } else if (cb[j] < ca[i]) {
      ++j;
    } else {
      dot += va[i] * vb[j];
      ++i;
      ++j;
    }
  }
  return dot;
}

}  // namespace hetesim
