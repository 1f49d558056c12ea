#include "cnrank/sparse.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cnrank {

namespace {

void check_row_indices(std::span<const std::uint32_t> cols, std::size_t n_cols,
                       std::size_t row) {
  std::uint32_t prev = 0;
  bool first = true;
  for (const std::uint32_t c : cols) {
    if (c >= n_cols) {
      throw std::invalid_argument("column index " + std::to_string(c) +
                                  " out of range in row " + std::to_string(row));
    }
    if (!first && c <= prev) {
      throw std::invalid_argument("column indices not strictly increasing in row " +
                                  std::to_string(row));
    }
    prev = c;
    first = false;
  }
}

}  // namespace

SparseBinaryMatrix::SparseBinaryMatrix(
    std::size_t n_rows, std::size_t n_cols,
    const std::vector<std::vector<std::uint32_t>>& rows)
    : n_rows_(n_rows), n_cols_(n_cols) {
  if (rows.size() != n_rows) {
    throw std::invalid_argument("row count mismatch");
  }
  row_start_.assign(n_rows + 1, 0);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  col_idx_.reserve(total);
  for (std::size_t r = 0; r < n_rows; ++r) {
    check_row_indices(rows[r], n_cols, r);
    col_idx_.insert(col_idx_.end(), rows[r].begin(), rows[r].end());
    row_start_[r + 1] = col_idx_.size();
  }
}

SparseBinaryMatrix SparseBinaryMatrix::from_triplets(
    std::size_t n_rows, std::size_t n_cols,
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries) {
  std::sort(entries.begin(), entries.end());
  std::vector<std::vector<std::uint32_t>> rows(n_rows);
  for (const auto& [r, c] : entries) {
    if (r >= n_rows) {
      throw std::invalid_argument("row index " + std::to_string(r) + " out of range");
    }
    if (!rows[r].empty() && rows[r].back() == c) {
      throw std::invalid_argument("duplicate entry at (" + std::to_string(r) + ", " +
                                  std::to_string(c) + ")");
    }
    rows[r].push_back(c);
  }
  return SparseBinaryMatrix(n_rows, n_cols, rows);
}

bool SparseBinaryMatrix::contains(std::size_t r, std::uint32_t c) const {
  const auto cols = row(r);
  return std::binary_search(cols.begin(), cols.end(), c);
}

SparseBinaryMatrix SparseBinaryMatrix::transposed() const {
  std::vector<std::vector<std::uint32_t>> cols(n_cols_);
  const auto counts = col_counts();
  for (std::size_t c = 0; c < n_cols_; ++c) cols[c].reserve(counts[c]);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    for (const std::uint32_t c : row(r)) {
      cols[c].push_back(static_cast<std::uint32_t>(r));
    }
  }
  return SparseBinaryMatrix(n_cols_, n_rows_, cols);
}

std::vector<std::size_t> SparseBinaryMatrix::col_counts() const {
  std::vector<std::size_t> counts(n_cols_, 0);
  for (const std::uint32_t c : col_idx_) ++counts[c];
  return counts;
}

SparseBinaryMatrix SparseBinaryMatrix::intersect(const SparseBinaryMatrix& a,
                                                 const SparseBinaryMatrix& b) {
  if (a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols()) {
    throw std::invalid_argument("intersect: dimension mismatch");
  }
  std::vector<std::vector<std::uint32_t>> rows(a.n_rows());
  for (std::size_t r = 0; r < a.n_rows(); ++r) {
    const auto ra = a.row(r);
    const auto rb = b.row(r);
    std::set_intersection(ra.begin(), ra.end(), rb.begin(), rb.end(),
                          std::back_inserter(rows[r]));
  }
  return SparseBinaryMatrix(a.n_rows(), a.n_cols(), rows);
}

SparseTernaryMatrix::SparseTernaryMatrix(
    std::size_t n_rows, std::size_t n_cols,
    const std::vector<std::vector<std::pair<std::uint32_t, int>>>& rows)
    : n_rows_(n_rows), n_cols_(n_cols) {
  if (rows.size() != n_rows) {
    throw std::invalid_argument("row count mismatch");
  }
  row_start_.assign(n_rows + 1, 0);
  for (std::size_t r = 0; r < n_rows; ++r) {
    std::uint32_t prev = 0;
    bool first = true;
    for (const auto& [c, v] : rows[r]) {
      if (c >= n_cols) {
        throw std::invalid_argument("column index out of range in row " +
                                    std::to_string(r));
      }
      if (!first && c <= prev) {
        throw std::invalid_argument("column indices not strictly increasing in row " +
                                    std::to_string(r));
      }
      if (v != 1 && v != -1) {
        throw std::invalid_argument("ternary value must be -1 or 1");
      }
      col_idx_.push_back(c);
      val_.push_back(static_cast<std::int8_t>(v));
      prev = c;
      first = false;
    }
    row_start_[r + 1] = col_idx_.size();
  }
}

SparseTernaryMatrix SparseTernaryMatrix::difference(const SparseBinaryMatrix& a,
                                                    const SparseBinaryMatrix& b) {
  if (a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols()) {
    throw std::invalid_argument("difference: dimension mismatch");
  }
  std::vector<std::vector<std::pair<std::uint32_t, int>>> rows(a.n_rows());
  for (std::size_t r = 0; r < a.n_rows(); ++r) {
    const auto ra = a.row(r);
    const auto rb = b.row(r);
    std::size_t i = 0, j = 0;
    auto& out = rows[r];
    while (i < ra.size() || j < rb.size()) {
      if (j == rb.size() || (i < ra.size() && ra[i] < rb[j])) {
        out.emplace_back(ra[i], 1);
        ++i;
      } else if (i == ra.size() || rb[j] < ra[i]) {
        out.emplace_back(rb[j], -1);
        ++j;
      } else {  // present in both: 1 - 1 = 0, omitted
        ++i;
        ++j;
      }
    }
  }
  return SparseTernaryMatrix(a.n_rows(), a.n_cols(), rows);
}

int SparseTernaryMatrix::value(std::size_t r, std::uint32_t c) const {
  const auto cols = row_cols(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0;
  return val_[row_start_[r] + static_cast<std::size_t>(it - cols.begin())];
}

std::int64_t SparseTernaryMatrix::sum() const {
  std::int64_t total = 0;
  for (const std::int8_t v : val_) total += v;
  return total;
}

double SparseTernaryMatrix::mean() const {
  const std::size_t cells = n_rows_ * n_cols_;
  if (cells == 0) return 0.0;
  return static_cast<double>(sum()) / static_cast<double>(cells);
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      out.at(c, r) = at(r, c);
    }
  }
  return out;
}

}  // namespace cnrank
