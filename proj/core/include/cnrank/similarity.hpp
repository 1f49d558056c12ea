#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cnrank/sparse.hpp"

namespace cnrank {

enum class SimilaritySource { outcomes, treatments };
enum class Orientation { user, item };

struct SimilarityConfig {
  std::size_t k = 100;
  double alpha = 1.0;
  SimilaritySource source = SimilaritySource::outcomes;
  Orientation orientation = Orientation::user;
};

struct Neighbor {
  std::uint32_t index = 0;
  double weight = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Neighborhood of one row. Entries are ordered by weight descending, ties by
/// ascending index; zero weights are dropped. When includes_self is set the
/// owner appears with weight exactly 1.
struct NeighborSet {
  std::uint32_t owner = 0;
  bool includes_self = false;
  std::vector<Neighbor> neighbors;

  friend bool operator==(const NeighborSet&, const NeighborSet&) = default;
};

struct SparseVectorView {
  std::size_t dim = 0;
  std::span<const std::uint32_t> indices;
};

/// Cosine between binary vectors: |support intersection| / sqrt(nnz_a * nnz_b).
/// Zero when either vector is empty. Throws on dimension mismatch.
double cosine(SparseVectorView a, SparseVectorView b);

/// Cosine from precomputed counts. All call sites share this expression so
/// equal inputs give bit-equal similarities.
inline double cosine_from_counts(std::size_t shared, std::size_t nnz_a, std::size_t nnz_b) {
  if (shared == 0) return 0.0;
  return static_cast<double>(shared) /
         std::sqrt(static_cast<double>(nnz_a) * static_cast<double>(nnz_b));
}

/// sim^alpha. Throws when alpha <= 0.
double scaled_weight(double sim, double alpha);

/// Per-row candidate neighbors at raw (unscaled) cosine, sorted descending
/// with ties by ascending index, self and zero similarities excluded, each
/// row truncated to the strongest k_max. Because x^alpha is strictly
/// monotone on (0,1], the top-k selection for any k <= k_max and any alpha
/// is a prefix of a candidate row.
struct NeighborCandidates {
  std::size_t n_rows = 0;
  std::size_t k_max = 0;
  std::vector<std::vector<Neighbor>> rows;
};

/// Builds candidate lists via an inverted index over columns. k_max must be
/// at most n_rows - 1.
NeighborCandidates compute_candidates(const SparseBinaryMatrix& matrix, std::size_t k_max);

/// Materializes one NeighborSet from candidates: prefix of k entries with
/// alpha scaling applied, plus the owner at weight 1 when include_self.
NeighborSet take_neighbors(const NeighborCandidates& candidates, std::uint32_t owner,
                           std::size_t k, double alpha, bool include_self);

/// One NeighborSet per row of the matrix, per cfg.k and cfg.alpha.
std::vector<NeighborSet> top_k_neighbors(const SparseBinaryMatrix& matrix,
                                         const SimilarityConfig& cfg, bool include_self);

/// Candidate cache file: "<n_rows> <k_max>" header, then one
/// "owner neighbor cosine" line per candidate. Round-trips exactly.
void save_candidates(const std::filesystem::path& path, const NeighborCandidates& candidates);
NeighborCandidates load_candidates(const std::filesystem::path& path);

}  // namespace cnrank
