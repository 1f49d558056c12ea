#include "cnrank/similarity.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cnrank/parallel.hpp"

namespace cnrank {

namespace {

bool weight_before(const Neighbor& a, const Neighbor& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  return a.index < b.index;
}

void check_k(std::size_t k, std::size_t n_rows) {
  if (n_rows == 0) {
    if (k > 0) throw std::invalid_argument("k must be 0 for an empty matrix");
    return;
  }
  if (k > n_rows - 1) {
    throw std::invalid_argument("k = " + std::to_string(k) + " exceeds row count - 1 = " +
                                std::to_string(n_rows - 1));
  }
}

}  // namespace

double cosine(SparseVectorView a, SparseVectorView b) {
  if (a.dim != b.dim) {
    throw std::invalid_argument("cosine of vectors with different lengths: " +
                                std::to_string(a.dim) + " vs " + std::to_string(b.dim));
  }
  std::size_t shared = 0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.indices.size() && ib < b.indices.size()) {
    if (a.indices[ia] == b.indices[ib]) {
      ++shared;
      ++ia;
      ++ib;
    } else if (a.indices[ia] < b.indices[ib]) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return cosine_from_counts(shared, a.indices.size(), b.indices.size());
}

double scaled_weight(double sim, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("alpha must be positive, got " + std::to_string(alpha));
  }
  return std::pow(sim, alpha);
}

NeighborCandidates compute_candidates(const SparseBinaryMatrix& matrix, std::size_t k_max) {
  const std::size_t n_rows = matrix.n_rows();
  check_k(k_max, n_rows);

  const SparseBinaryMatrix inverted = matrix.transposed();
  NeighborCandidates candidates;
  candidates.n_rows = n_rows;
  candidates.k_max = k_max;
  candidates.rows.resize(n_rows);

  parallel_for(n_rows, [&](std::size_t r) {
    thread_local std::vector<std::uint32_t> shared_counts;
    thread_local std::vector<std::uint32_t> touched;
    if (shared_counts.size() != n_rows) shared_counts.assign(n_rows, 0);

    for (std::uint32_t c : matrix.row(r)) {
      for (std::uint32_t v : inverted.row(c)) {
        if (shared_counts[v]++ == 0) touched.push_back(v);
      }
    }

    const std::size_t nnz_r = matrix.row_nnz(r);
    std::vector<Neighbor>& out = candidates.rows[r];
    out.reserve(std::min(touched.size(), k_max));
    for (std::uint32_t v : touched) {
      if (v != r) {
        out.push_back({v, cosine_from_counts(shared_counts[v], nnz_r, matrix.row_nnz(v))});
      }
      shared_counts[v] = 0;
    }
    touched.clear();

    std::sort(out.begin(), out.end(), weight_before);
    if (out.size() > k_max) out.resize(k_max);
    out.shrink_to_fit();
  });
  return candidates;
}

NeighborSet take_neighbors(const NeighborCandidates& candidates, std::uint32_t owner,
                           std::size_t k, double alpha, bool include_self) {
  if (owner >= candidates.n_rows) throw std::out_of_range("owner row out of range");
  if (k > candidates.k_max) {
    throw std::invalid_argument("k = " + std::to_string(k) + " exceeds cached k_max = " +
                                std::to_string(candidates.k_max));
  }
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("alpha must be positive, got " + std::to_string(alpha));
  }

  const std::vector<Neighbor>& row = candidates.rows[owner];
  NeighborSet set;
  set.owner = owner;
  set.includes_self = include_self;
  const std::size_t take = std::min(k, row.size());
  set.neighbors.reserve(take + (include_self ? 1 : 0));
  for (std::size_t i = 0; i < take; ++i) {
    set.neighbors.push_back({row[i].index, std::pow(row[i].weight, alpha)});
  }
  if (include_self) set.neighbors.push_back({owner, 1.0});
  std::sort(set.neighbors.begin(), set.neighbors.end(), weight_before);
  return set;
}

std::vector<NeighborSet> top_k_neighbors(const SparseBinaryMatrix& matrix,
                                         const SimilarityConfig& cfg, bool include_self) {
  const NeighborCandidates candidates = compute_candidates(matrix, cfg.k);
  std::vector<NeighborSet> sets(matrix.n_rows());
  parallel_for(matrix.n_rows(), [&](std::size_t r) {
    sets[r] = take_neighbors(candidates, static_cast<std::uint32_t>(r), cfg.k, cfg.alpha,
                             include_self);
  });
  return sets;
}

void save_candidates(const std::filesystem::path& path, const NeighborCandidates& candidates) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write neighbor cache: " + path.string());
  out << candidates.n_rows << ' ' << candidates.k_max << '\n';
  char buffer[64];
  for (std::size_t r = 0; r < candidates.rows.size(); ++r) {
    for (const Neighbor& nb : candidates.rows[r]) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", nb.weight);
      out << r << ' ' << nb.index << ' ' << buffer << '\n';
    }
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

NeighborCandidates load_candidates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open neighbor cache: " + path.string());

  NeighborCandidates candidates;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty neighbor cache: " + path.string());
  }
  ++line_no;
  {
    std::istringstream header(line);
    if (!(header >> candidates.n_rows >> candidates.k_max)) {
      throw std::runtime_error(path.string() + ":1: malformed header");
    }
  }
  candidates.rows.resize(candidates.n_rows);

  std::size_t prev_owner = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::size_t owner;
    std::uint32_t neighbor;
    double weight;
    if (!(fields >> owner >> neighbor >> weight)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": malformed candidate line");
    }
    if (owner >= candidates.n_rows || neighbor >= candidates.n_rows) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": row index out of range");
    }
    if (owner < prev_owner) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": owners out of order");
    }
    prev_owner = owner;
    candidates.rows[owner].push_back({neighbor, weight});
  }
  for (std::size_t r = 0; r < candidates.n_rows; ++r) {
    if (candidates.rows[r].size() > candidates.k_max) {
      throw std::runtime_error("neighbor cache row " + std::to_string(r) +
                               " exceeds declared k_max");
    }
    if (!std::is_sorted(candidates.rows[r].begin(), candidates.rows[r].end(), weight_before)) {
      throw std::runtime_error("neighbor cache row " + std::to_string(r) + " is not sorted");
    }
  }
  return candidates;
}

}  // namespace cnrank
