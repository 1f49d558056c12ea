#include "cnrank/causal_neighbors.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "cnrank/parallel.hpp"

namespace cnrank {

namespace {

void check_pair(const SparseBinaryMatrix& y, const SparseBinaryMatrix& z) {
  if (y.n_rows() != z.n_rows() || y.n_cols() != z.n_cols()) {
    throw std::invalid_argument("outcome and treatment matrices have different shapes: " +
                                std::to_string(y.n_rows()) + "x" + std::to_string(y.n_cols()) +
                                " vs " + std::to_string(z.n_rows()) + "x" +
                                std::to_string(z.n_cols()));
  }
}

void check_betas(const RankerConfig& cfg) {
  if (cfg.beta_t < 0.0 || cfg.beta_c < 0.0) {
    throw std::invalid_argument("shrinkage parameters must be nonnegative");
  }
}

std::size_t oriented_count(const SparseBinaryMatrix& y, Orientation orientation) {
  return orientation == Orientation::user ? y.n_rows() : y.n_cols();
}

void check_neighbors(const std::vector<NeighborSet>& neighbors, std::size_t expected,
                     bool include_self) {
  if (neighbors.size() != expected) {
    throw std::invalid_argument("expected " + std::to_string(expected) + " neighbor sets, got " +
                                std::to_string(neighbors.size()));
  }
  for (const NeighborSet& set : neighbors) {
    if (set.includes_self != include_self) {
      throw std::invalid_argument(include_self
                                      ? "neighbor sets must include the owner for this mode"
                                      : "neighbor sets must exclude the owner for this mode");
    }
  }
}

double shrunk_ratio(double num, double den, double beta) {
  const double d = beta + den;
  return d > 0.0 ? num / d : 0.0;
}

/// Per-item neighborhood sums for one user. wsum is per item because in the
/// item orientation every item has its own neighborhood.
struct RowSums {
  std::vector<double> num_t;  // sum of w * Z * Y
  std::vector<double> den_t;  // sum of w * Z
  std::vector<double> num_y;  // sum of w * Y
  std::vector<double> wsum;   // sum of w
  std::vector<std::uint8_t> own_y;
  std::vector<std::uint8_t> own_z;
};

void scatter_row(const SparseBinaryMatrix& m, std::size_t r, std::vector<std::uint8_t>& bits) {
  bits.assign(m.n_cols(), 0);
  for (std::uint32_t c : m.row(r)) bits[c] = 1;
}

/// Fills sums for user u. zy must be the entrywise AND of z and y.
void fill_sums(const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
               const SparseBinaryMatrix& zy, const std::vector<NeighborSet>& neighbors,
               Orientation orientation, std::size_t u, RowSums& sums) {
  const std::size_t n_items = y.n_cols();
  sums.num_t.assign(n_items, 0.0);
  sums.den_t.assign(n_items, 0.0);
  sums.num_y.assign(n_items, 0.0);
  scatter_row(y, u, sums.own_y);
  scatter_row(z, u, sums.own_z);

  if (orientation == Orientation::user) {
    double total = 0.0;
    for (const Neighbor& nb : neighbors[u].neighbors) {
      const double w = nb.weight;
      total += w;
      for (std::uint32_t i : zy.row(nb.index)) sums.num_t[i] += w;
      for (std::uint32_t i : z.row(nb.index)) sums.den_t[i] += w;
      for (std::uint32_t i : y.row(nb.index)) sums.num_y[i] += w;
    }
    sums.wsum.assign(n_items, total);
  } else {
    sums.wsum.assign(n_items, 0.0);
    for (std::size_t i = 0; i < n_items; ++i) {
      for (const Neighbor& nb : neighbors[i].neighbors) {
        const double w = nb.weight;
        sums.wsum[i] += w;
        if (sums.own_z[nb.index]) {
          sums.den_t[i] += w;
          if (sums.own_y[nb.index]) sums.num_t[i] += w;
        }
        if (sums.own_y[nb.index]) sums.num_y[i] += w;
      }
    }
  }
}

void outcome_rows(const RowSums& sums, double beta_t, double beta_c, std::span<double> y_t,
                  std::span<double> y_c) {
  for (std::size_t i = 0; i < y_t.size(); ++i) {
    y_t[i] = shrunk_ratio(sums.num_t[i], sums.den_t[i], beta_t);
    const double num_c = std::max(0.0, sums.num_y[i] - sums.num_t[i]);
    const double den_c = std::max(0.0, sums.wsum[i] - sums.den_t[i]);
    y_c[i] = shrunk_ratio(num_c, den_c, beta_c);
  }
}

void mixed_row(const RowSums& sums, double beta_t, double beta_c, std::span<double> tau) {
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double y_t = shrunk_ratio(sums.num_t[i], sums.den_t[i], beta_t);
    const double num_c = std::max(0.0, sums.num_y[i] - sums.num_t[i]);
    const double den_c = std::max(0.0, sums.wsum[i] - sums.den_t[i]);
    tau[i] = y_t - shrunk_ratio(num_c, den_c, beta_c);
  }
}

void wom_row(const RowSums& sums, std::span<double> tau) {
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double y_t = shrunk_ratio(sums.num_t[i], sums.den_t[i], 0.0);
    const double num_c = std::max(0.0, sums.num_y[i] - sums.num_t[i]);
    const double den_c = std::max(0.0, sums.wsum[i] - sums.den_t[i]);
    const double y_c = shrunk_ratio(num_c, den_c, 0.0);
    const double own = sums.own_y[i];
    tau[i] = sums.own_z[i] ? own - y_c : y_t - own;
  }
}

std::vector<NeighborSet> build_neighbors(const SparseBinaryMatrix& y,
                                         const SparseBinaryMatrix& z, const RankerConfig& cfg) {
  const SparseBinaryMatrix& source =
      cfg.sim.source == SimilaritySource::outcomes ? y : z;
  if (cfg.sim.orientation == Orientation::user) {
    return top_k_neighbors(source, cfg.sim, cfg.mix_own);
  }
  return top_k_neighbors(source.transposed(), cfg.sim, cfg.mix_own);
}

std::pair<DenseMatrix, DenseMatrix> outcome_matrices(const SparseBinaryMatrix& y,
                                                     const SparseBinaryMatrix& z,
                                                     const std::vector<NeighborSet>& neighbors,
                                                     const RankerConfig& cfg, double beta_t,
                                                     double beta_c) {
  check_pair(y, z);
  check_neighbors(neighbors, oriented_count(y, cfg.sim.orientation), cfg.mix_own);

  const SparseBinaryMatrix zy = SparseBinaryMatrix::intersect(z, y);
  DenseMatrix y_t_hat(y.n_rows(), y.n_cols());
  DenseMatrix y_c_hat(y.n_rows(), y.n_cols());
  parallel_for(y.n_rows(), [&](std::size_t u) {
    thread_local RowSums sums;
    fill_sums(y, z, zy, neighbors, cfg.sim.orientation, u, sums);
    outcome_rows(sums, beta_t, beta_c, y_t_hat.row(u), y_c_hat.row(u));
  });
  return {std::move(y_t_hat), std::move(y_c_hat)};
}

}  // namespace

std::pair<DenseMatrix, DenseMatrix> potential_outcomes_shrunk(
    const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
    const std::vector<NeighborSet>& neighbors, const RankerConfig& cfg) {
  check_betas(cfg);
  return outcome_matrices(y, z, neighbors, cfg, cfg.beta_t, cfg.beta_c);
}

std::pair<DenseMatrix, DenseMatrix> potential_outcomes_wom(
    const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
    const std::vector<NeighborSet>& neighbors, const RankerConfig& cfg) {
  if (cfg.mix_own) {
    throw std::invalid_argument("plain neighbor-ratio estimates require mix_own = false");
  }
  return outcome_matrices(y, z, neighbors, cfg, 0.0, 0.0);
}

DenseMatrix effect_wom(const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
                       const DenseMatrix& y_t_hat, const DenseMatrix& y_c_hat) {
  check_pair(y, z);
  if (y_t_hat.n_rows() != y.n_rows() || y_t_hat.n_cols() != y.n_cols() ||
      y_c_hat.n_rows() != y.n_rows() || y_c_hat.n_cols() != y.n_cols()) {
    throw std::invalid_argument("estimate matrices do not match the outcome matrix shape");
  }
  DenseMatrix tau(y.n_rows(), y.n_cols());
  parallel_for(y.n_rows(), [&](std::size_t u) {
    thread_local std::vector<std::uint8_t> own_y, own_z;
    scatter_row(y, u, own_y);
    scatter_row(z, u, own_z);
    const std::span<const double> y_t = y_t_hat.row(u);
    const std::span<const double> y_c = y_c_hat.row(u);
    const std::span<double> out = tau.row(u);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double own = own_y[i];
      out[i] = own_z[i] ? own - y_c[i] : y_t[i] - own;
    }
  });
  return tau;
}

DenseMatrix effect_mixed(const DenseMatrix& y_t_hat, const DenseMatrix& y_c_hat) {
  if (y_t_hat.n_rows() != y_c_hat.n_rows() || y_t_hat.n_cols() != y_c_hat.n_cols()) {
    throw std::invalid_argument("estimate matrices have different shapes");
  }
  DenseMatrix tau(y_t_hat.n_rows(), y_t_hat.n_cols());
  for (std::size_t u = 0; u < tau.n_rows(); ++u) {
    for (std::size_t i = 0; i < tau.n_cols(); ++i) {
      tau.at(u, i) = y_t_hat.at(u, i) - y_c_hat.at(u, i);
    }
  }
  return tau;
}

EffectEstimates estimate_effects(const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
                                 const RankerConfig& cfg) {
  check_pair(y, z);
  check_betas(cfg);
  const std::vector<NeighborSet> neighbors = build_neighbors(y, z, cfg);

  EffectEstimates est;
  if (cfg.mix_own) {
    std::tie(est.y_t_hat, est.y_c_hat) = potential_outcomes_shrunk(y, z, neighbors, cfg);
    est.tau_hat = effect_mixed(est.y_t_hat, est.y_c_hat);
  } else {
    std::tie(est.y_t_hat, est.y_c_hat) = potential_outcomes_wom(y, z, neighbors, cfg);
    est.tau_hat = effect_wom(y, z, est.y_t_hat, est.y_c_hat);
  }
  return est;
}

RankedLists rank_with_neighbors(const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
                                const std::vector<NeighborSet>& neighbors,
                                const RankerConfig& cfg) {
  check_pair(y, z);
  check_betas(cfg);
  check_neighbors(neighbors, oriented_count(y, cfg.sim.orientation), cfg.mix_own);

  const SparseBinaryMatrix zy = SparseBinaryMatrix::intersect(z, y);
  RankedLists lists;
  lists.n_items = y.n_cols();
  lists.items.resize(y.n_rows());
  lists.scores.resize(y.n_rows());

  parallel_for(y.n_rows(), [&](std::size_t u) {
    thread_local RowSums sums;
    thread_local std::vector<double> tau;
    tau.resize(y.n_cols());
    fill_sums(y, z, zy, neighbors, cfg.sim.orientation, u, sums);
    if (cfg.mix_own) {
      mixed_row(sums, cfg.beta_t, cfg.beta_c, tau);
    } else {
      wom_row(sums, tau);
    }
    lists.items[u] = rank_row(tau);
    lists.scores[u].resize(tau.size());
    for (std::size_t pos = 0; pos < tau.size(); ++pos) {
      lists.scores[u][pos] = tau[lists.items[u][pos]];
    }
  });
  return lists;
}

RankedLists run_ranker(const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
                       const RankerConfig& cfg) {
  check_pair(y, z);
  check_betas(cfg);
  return rank_with_neighbors(y, z, build_neighbors(y, z, cfg), cfg);
}

void sweep_shrinkage(
    const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
    const std::vector<NeighborSet>& neighbors, Orientation orientation,
    std::span<const std::pair<double, double>> betas,
    const std::function<void(std::size_t, std::size_t, std::span<const double>)>& visit) {
  check_pair(y, z);
  check_neighbors(neighbors, oriented_count(y, orientation), true);
  for (const auto& [beta_t, beta_c] : betas) {
    if (beta_t < 0.0 || beta_c < 0.0) {
      throw std::invalid_argument("shrinkage parameters must be nonnegative");
    }
  }

  const SparseBinaryMatrix zy = SparseBinaryMatrix::intersect(z, y);
  parallel_for(y.n_rows(), [&](std::size_t u) {
    thread_local RowSums sums;
    thread_local std::vector<double> tau;
    tau.resize(y.n_cols());
    fill_sums(y, z, zy, neighbors, orientation, u, sums);
    for (std::size_t b = 0; b < betas.size(); ++b) {
      mixed_row(sums, betas[b].first, betas[b].second, tau);
      visit(u, b, tau);
    }
  });
}

}  // namespace cnrank
