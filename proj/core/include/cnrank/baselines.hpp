#pragma once

#include <cstdint>
#include <optional>

#include "cnrank/ranking.hpp"
#include "cnrank/similarity.hpp"
#include "cnrank/sparse.hpp"

namespace cnrank {

enum class BaselineMethod { random, pop, ubn, ibn };

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::random;
  SimilarityConfig sim;          // ubn/ibn only
  std::optional<std::uint64_t> seed;  // required for random
};

/// Independent uniform item permutation per user, reproducible from the
/// seed and independent of worker scheduling. Scores are reported as 0.
RankedLists rank_random(std::size_t n_users, std::size_t n_items, std::uint64_t seed);

/// Every user gets the same list: items by descending count of positive
/// outcomes, ties by ascending item index.
RankedLists rank_pop(const SparseBinaryMatrix& y);

/// Neighborhood predictions s[u][i] = sum_w(w * Y) / sum_w(w) over the
/// user's neighbors (user orientation) or the item's neighbors (item
/// orientation), self excluded; 0 when the weight sum is 0.
DenseMatrix ubn_ibn_scores(const SparseBinaryMatrix& y, const SimilarityConfig& cfg);

/// Ranks ubn_ibn_scores rows descending, ties by ascending item index.
RankedLists rank_ubn_ibn(const SparseBinaryMatrix& y, const SimilarityConfig& cfg);

/// Dispatch on cfg.method. random requires cfg.seed.
RankedLists rank_baseline(const SparseBinaryMatrix& y, const BaselineConfig& cfg);

}  // namespace cnrank
