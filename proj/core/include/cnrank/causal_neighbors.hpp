#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "cnrank/ranking.hpp"
#include "cnrank/similarity.hpp"
#include "cnrank/sparse.hpp"

namespace cnrank {

/// Configuration of a causal neighborhood ranker. Orientation picks the
/// user-based (CUBN) or item-based (CIBN) variant; the similarity source
/// picks the -O (outcomes) or -T (treatment assignments) flavor. mix_own
/// selects between mixing the own observation into shrunk estimates and the
/// -woM form, which uses plain neighbor ratios and ignores the betas.
struct RankerConfig {
  SimilarityConfig sim;
  double beta_t = 0.0;
  double beta_c = 0.0;
  bool mix_own = true;
};

/// Dense potential-outcome and effect estimates over all user-item pairs.
/// In mixed mode tau_hat = y_t_hat - y_c_hat entrywise; in -woM mode tau_hat
/// additionally routes the own observation through the observed side.
struct EffectEstimates {
  DenseMatrix y_t_hat;
  DenseMatrix y_c_hat;
  DenseMatrix tau_hat;
};

/// Shrunk neighborhood estimates of both potential outcomes:
/// y_t_hat[u][i] = sum_w(w * Z * Y) / (beta_t + sum_w(w * Z)) over the
/// neighborhood of u (user orientation) or of i (item orientation), with the
/// control side analogous. A denominator that is exactly 0 yields 0.
/// Neighbor sets must carry include_self == cfg.mix_own.
std::pair<DenseMatrix, DenseMatrix> potential_outcomes_shrunk(
    const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
    const std::vector<NeighborSet>& neighbors, const RankerConfig& cfg);

/// Unshrunk neighbor-ratio estimates (no betas, self excluded).
std::pair<DenseMatrix, DenseMatrix> potential_outcomes_wom(
    const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
    const std::vector<NeighborSet>& neighbors, const RankerConfig& cfg);

/// tau_hat[u][i] = Z(Y - y_c_hat) + (1 - Z)(y_t_hat - Y).
DenseMatrix effect_wom(const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
                       const DenseMatrix& y_t_hat, const DenseMatrix& y_c_hat);

/// tau_hat = y_t_hat - y_c_hat.
DenseMatrix effect_mixed(const DenseMatrix& y_t_hat, const DenseMatrix& y_c_hat);

/// Dense estimates for one config, building neighbors internally. Intended
/// for small instances and inspection; run_ranker streams instead.
EffectEstimates estimate_effects(const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
                                 const RankerConfig& cfg);

/// Full ranking pipeline: neighbor selection from the configured source
/// matrix, per-user effect estimation, and per-user ranking by tau_hat
/// descending with ties by ascending item index. Effect rows are
/// materialized per user, never as a full dense matrix.
RankedLists run_ranker(const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
                       const RankerConfig& cfg);

/// run_ranker with neighbor sets already built for cfg.sim.orientation and
/// include_self == cfg.mix_own; skips the similarity phase.
RankedLists rank_with_neighbors(const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
                                const std::vector<NeighborSet>& neighbors,
                                const RankerConfig& cfg);

/// Evaluates the mixed-mode effect rows for many shrinkage settings while
/// computing each user's neighborhood sums once. visit(user, beta_index,
/// tau_row) runs for every user and every (beta_t, beta_c) pair, possibly
/// concurrently across users; tau_row is only valid during the call.
void sweep_shrinkage(
    const SparseBinaryMatrix& y, const SparseBinaryMatrix& z,
    const std::vector<NeighborSet>& neighbors, Orientation orientation,
    std::span<const std::pair<double, double>> betas,
    const std::function<void(std::size_t, std::size_t, std::span<const double>)>& visit);

}  // namespace cnrank
