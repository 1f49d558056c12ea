#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"

#include "cnrank/baselines.hpp"

#include "reference.hpp"

using namespace cnrank;

namespace {

SparseBinaryMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                 double density) {
  std::bernoulli_distribution flip(density);
  std::vector<std::vector<std::uint32_t>> data(rows);
  for (auto& row : data)
    for (std::uint32_t c = 0; c < cols; ++c)
      if (flip(rng)) row.push_back(c);
  return SparseBinaryMatrix(rows, cols, data);
}

refimpl::Grid to_grid(const SparseBinaryMatrix& m) {
  refimpl::Grid grid(m.n_rows(), std::vector<int>(m.n_cols(), 0));
  for (std::size_t r = 0; r < m.n_rows(); ++r)
    for (const std::uint32_t c : m.row(r)) grid[r][c] = 1;
  return grid;
}

bool is_permutation_of_items(const std::vector<std::uint32_t>& items, std::size_t n_items) {
  if (items.size() != n_items) return false;
  std::vector<bool> seen(n_items, false);
  for (const std::uint32_t i : items) {
    if (i >= n_items || seen[i]) return false;
    seen[i] = true;
  }
  return true;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("random rankings are seeded permutations") {
  const RankedLists a = rank_random(6, 9, 42);
  const RankedLists b = rank_random(6, 9, 42);
  const RankedLists c = rank_random(6, 9, 43);
  REQUIRE(a.n_users() == 6);
  CHECK(a.n_items == 9);
  for (std::size_t u = 0; u < 6; ++u) {
    CHECK(is_permutation_of_items(a.items[u], 9));
    CHECK(a.items[u] == b.items[u]);
    for (const double s : a.scores[u]) CHECK(s == 0.0);
  }
  CHECK(a.items != c.items);
  // Users draw from independent streams, so identical lists are unexpected.
  CHECK(a.items[0] != a.items[1]);
}

TEST_CASE("popularity ranks items by positive outcome counts") {
  // Counts per item: item0 = 2, item1 = 3, item2 = 0, item3 = 2.
  const SparseBinaryMatrix y(4, 4, {{0, 1}, {1, 3}, {0, 1, 3}, {}});
  const RankedLists lists = rank_pop(y);
  const std::vector<std::uint32_t> expected{1, 0, 3, 2};
  for (std::size_t u = 0; u < 4; ++u) {
    CHECK(lists.items[u] == expected);
    CHECK(lists.scores[u] == std::vector<double>{3.0, 2.0, 2.0, 0.0});
  }
}

TEST_CASE("neighborhood scores match the dense reference in both orientations") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 15; ++trial) {
    const SparseBinaryMatrix y = random_matrix(rng, 7, 6, 0.45);
    const refimpl::Grid grid = to_grid(y);
    for (const Orientation orientation : {Orientation::user, Orientation::item}) {
      SimilarityConfig cfg;
      cfg.k = 3;
      cfg.alpha = 2.0;
      cfg.orientation = orientation;
      const DenseMatrix scores = ubn_ibn_scores(y, cfg);
      const refimpl::Table expected =
          refimpl::neighborhood_scores(grid, 3, 2.0, orientation == Orientation::item);
      for (std::size_t u = 0; u < 7; ++u)
        for (std::size_t i = 0; i < 6; ++i)
          CHECK(scores.at(u, i) == doctest::Approx(expected[u][i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("isolated users score zero everywhere") {
  // User 2 shares no items with anyone, so it has no neighbors.
  const SparseBinaryMatrix y(3, 4, {{0, 1}, {0, 1}, {3}});
  SimilarityConfig cfg;
  cfg.k = 2;
  const DenseMatrix scores = ubn_ibn_scores(y, cfg);
  for (std::size_t i = 0; i < 4; ++i) CHECK(scores.at(2, i) == 0.0);
  // User 0's only neighbor is user 1 and vice versa.
  CHECK(scores.at(0, 0) == 1.0);
  CHECK(scores.at(0, 3) == 0.0);
}

TEST_CASE("ranked neighborhood lists order scores with index tie-break") {
  const SparseBinaryMatrix y(3, 4, {{0, 1}, {0, 1}, {3}});
  SimilarityConfig cfg;
  cfg.k = 2;
  const RankedLists lists = rank_ubn_ibn(y, cfg);
  // User 0: items 0 and 1 score 1, items 2 and 3 score 0; ties break upward.
  CHECK(lists.items[0] == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("baseline dispatch honors the method and validates the seed") {
  const SparseBinaryMatrix y(3, 3, {{0}, {1}, {2}});
  BaselineConfig cfg;
  cfg.method = BaselineMethod::pop;
  CHECK(rank_baseline(y, cfg).items == rank_pop(y).items);

  cfg.method = BaselineMethod::random;
  CHECK_THROWS_AS(rank_baseline(y, cfg), std::invalid_argument);
  cfg.seed = 5;
  CHECK(rank_baseline(y, cfg).items == rank_random(3, 3, 5).items);

  cfg.method = BaselineMethod::ubn;
  cfg.sim.k = 2;
  CHECK(rank_baseline(y, cfg).items == rank_ubn_ibn(y, cfg.sim).items);

  cfg.method = BaselineMethod::ibn;
  cfg.sim.orientation = Orientation::item;
  CHECK(rank_baseline(y, cfg).items == rank_ubn_ibn(y, cfg.sim).items);
}

}  // TEST_SUITE
