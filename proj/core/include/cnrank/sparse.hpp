#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace cnrank {

/// Row-major sparse 0/1 matrix (CSR layout). Column indices within a row are
/// strictly increasing; the stored value is always 1. Immutable after
/// construction and safe to share across workers.
class SparseBinaryMatrix {
 public:
  SparseBinaryMatrix() = default;
  SparseBinaryMatrix(std::size_t n_rows, std::size_t n_cols,
                     const std::vector<std::vector<std::uint32_t>>& rows);

  static SparseBinaryMatrix from_triplets(
      std::size_t n_rows, std::size_t n_cols,
      std::vector<std::pair<std::uint32_t, std::uint32_t>> entries);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }
  std::size_t nnz() const { return col_idx_.size(); }
  std::size_t row_nnz(std::size_t r) const {
    return row_start_[r + 1] - row_start_[r];
  }
  std::span<const std::uint32_t> row(std::size_t r) const {
    return {col_idx_.data() + row_start_[r], row_nnz(r)};
  }
  bool contains(std::size_t r, std::uint32_t c) const;
  double value(std::size_t r, std::uint32_t c) const {
    return contains(r, c) ? 1.0 : 0.0;
  }

  SparseBinaryMatrix transposed() const;
  std::vector<std::size_t> col_counts() const;

  /// Entrywise AND; operands must share dimensions.
  static SparseBinaryMatrix intersect(const SparseBinaryMatrix& a,
                                      const SparseBinaryMatrix& b);

  bool operator==(const SparseBinaryMatrix&) const = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_start_ = {0};
  std::vector<std::uint32_t> col_idx_;
};

/// Row-major sparse matrix with values in {-1, +1}; zeros implied. Holds the
/// ground-truth causal effects tau of a generated split.
class SparseTernaryMatrix {
 public:
  SparseTernaryMatrix() = default;
  SparseTernaryMatrix(std::size_t n_rows, std::size_t n_cols,
                      const std::vector<std::vector<std::pair<std::uint32_t, int>>>& rows);

  /// a - b entrywise for binary a, b with identical dimensions.
  static SparseTernaryMatrix difference(const SparseBinaryMatrix& a,
                                        const SparseBinaryMatrix& b);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }
  std::size_t nnz() const { return col_idx_.size(); }
  std::span<const std::uint32_t> row_cols(std::size_t r) const {
    return {col_idx_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
  }
  std::span<const std::int8_t> row_vals(std::size_t r) const {
    return {val_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
  }
  int value(std::size_t r, std::uint32_t c) const;

  /// Sum of all entries (zeros contribute nothing).
  std::int64_t sum() const;
  /// Mean over all n_rows * n_cols cells; the ATE of a split when this is tau.
  double mean() const;

  bool operator==(const SparseTernaryMatrix&) const = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_start_ = {0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<std::int8_t> val_;
};

/// Dense row-major real matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t n_rows() const { return rows_; }
  std::size_t n_cols() const { return cols_; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  DenseMatrix transposed() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace cnrank
