#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cnrank/sparse.hpp"

namespace cnrank {

/// Per-user item rankings with the scores that produced them. items[u] is a
/// permutation of all item indices, best first; scores[u] is aligned with
/// items[u]. Rank positions are 1-based: items[u][0] has rank 1.
struct RankedLists {
  std::size_t n_items = 0;
  std::vector<std::vector<std::uint32_t>> items;
  std::vector<std::vector<double>> scores;

  std::size_t n_users() const { return items.size(); }
};

/// Indices of scores sorted descending, ties by ascending index.
std::vector<std::uint32_t> rank_row(std::span<const double> scores);

/// Ranks every row of a dense score matrix.
RankedLists rank_score_matrix(const DenseMatrix& scores);

/// CSV with header user,item,rank,tau_hat; rows grouped by user in rank
/// order. Byte-deterministic for equal inputs.
void save_rankings(const std::filesystem::path& path, const RankedLists& lists);

/// Inverse of save_rankings. Validates that every user ranks every item
/// exactly once.
RankedLists load_rankings(const std::filesystem::path& path);

/// Reads a (user, item, score) CSV into a dense matrix; pairs absent from
/// the file get score 0. Indices beyond the given shape, non-finite scores,
/// and duplicate pairs are errors.
DenseMatrix load_score_table(const std::filesystem::path& path, std::size_t n_users,
                             std::size_t n_items);

}  // namespace cnrank
