#include "cnrank/baselines.hpp"

#include <numeric>
#include <stdexcept>

#include "cnrank/parallel.hpp"
#include "cnrank/rng.hpp"

namespace cnrank {

RankedLists rank_random(std::size_t n_users, std::size_t n_items, std::uint64_t seed) {
  RankedLists lists;
  lists.n_items = n_items;
  lists.items.resize(n_users);
  lists.scores.resize(n_users);
  parallel_for(n_users, [&](std::size_t u) {
    const rng::Key user_key = rng::Key(seed).with("random-ranking").with(u);
    std::vector<std::uint32_t>& order = lists.items[u];
    order.resize(n_items);
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t j = n_items; j > 1; --j) {
      const std::uint64_t pick = rng::below(user_key.with(j), j);
      std::swap(order[j - 1], order[pick]);
    }
    lists.scores[u].assign(n_items, 0.0);
  });
  return lists;
}

RankedLists rank_pop(const SparseBinaryMatrix& y) {
  const std::vector<std::size_t> counts = y.col_counts();
  std::vector<double> scores(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) scores[i] = static_cast<double>(counts[i]);
  const std::vector<std::uint32_t> order = rank_row(scores);
  std::vector<double> ordered_scores(counts.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    ordered_scores[pos] = scores[order[pos]];
  }

  RankedLists lists;
  lists.n_items = y.n_cols();
  lists.items.assign(y.n_rows(), order);
  lists.scores.assign(y.n_rows(), ordered_scores);
  return lists;
}

DenseMatrix ubn_ibn_scores(const SparseBinaryMatrix& y, const SimilarityConfig& cfg) {
  DenseMatrix scores(y.n_rows(), y.n_cols());
  if (cfg.orientation == Orientation::user) {
    const std::vector<NeighborSet> neighbors = top_k_neighbors(y, cfg, false);
    parallel_for(y.n_rows(), [&](std::size_t u) {
      thread_local std::vector<double> num;
      num.assign(y.n_cols(), 0.0);
      double wsum = 0.0;
      for (const Neighbor& nb : neighbors[u].neighbors) {
        wsum += nb.weight;
        for (std::uint32_t i : y.row(nb.index)) num[i] += nb.weight;
      }
      const std::span<double> row = scores.row(u);
      for (std::size_t i = 0; i < row.size(); ++i) {
        row[i] = wsum > 0.0 ? num[i] / wsum : 0.0;
      }
    });
    return scores;
  }

  const std::vector<NeighborSet> neighbors = top_k_neighbors(y.transposed(), cfg, false);
  std::vector<double> wsum(y.n_cols(), 0.0);
  for (std::size_t i = 0; i < y.n_cols(); ++i) {
    for (const Neighbor& nb : neighbors[i].neighbors) wsum[i] += nb.weight;
  }
  parallel_for(y.n_rows(), [&](std::size_t u) {
    thread_local std::vector<std::uint8_t> own_y;
    own_y.assign(y.n_cols(), 0);
    for (std::uint32_t c : y.row(u)) own_y[c] = 1;
    const std::span<double> row = scores.row(u);
    for (std::size_t i = 0; i < row.size(); ++i) {
      double num = 0.0;
      for (const Neighbor& nb : neighbors[i].neighbors) {
        if (own_y[nb.index]) num += nb.weight;
      }
      row[i] = wsum[i] > 0.0 ? num / wsum[i] : 0.0;
    }
  });
  return scores;
}

RankedLists rank_ubn_ibn(const SparseBinaryMatrix& y, const SimilarityConfig& cfg) {
  return rank_score_matrix(ubn_ibn_scores(y, cfg));
}

RankedLists rank_baseline(const SparseBinaryMatrix& y, const BaselineConfig& cfg) {
  switch (cfg.method) {
    case BaselineMethod::random:
      if (!cfg.seed) {
        throw std::invalid_argument("random ranking requires a seed");
      }
      return rank_random(y.n_rows(), y.n_cols(), *cfg.seed);
    case BaselineMethod::pop:
      return rank_pop(y);
    case BaselineMethod::ubn:
    case BaselineMethod::ibn: {
      SimilarityConfig sim = cfg.sim;
      sim.orientation =
          cfg.method == BaselineMethod::ubn ? Orientation::user : Orientation::item;
      return rank_ubn_ibn(y, sim);
    }
  }
  throw std::invalid_argument("unknown baseline method");
}

}  // namespace cnrank
