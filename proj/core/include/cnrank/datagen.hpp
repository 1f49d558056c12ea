#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cnrank/dataset.hpp"
#include "cnrank/sparse.hpp"

namespace cnrank {

/// Generation parameters. epsilon shifts predicted ratings before the
/// logistic squash; a scales propensities and b controls their unevenness
/// across the per-user popularity ranks; when a is absent it is calibrated
/// so the expected number of recommendations per user hits
/// target_recs_per_user. Counts are independent samples per split.
struct GenParams {
  double epsilon = 5.0;
  double b = 1.0;
  double target_recs_per_user = 100.0;
  std::optional<double> a;
  std::size_t n_train = 1;
  std::size_t n_validation = 1;
  std::size_t n_test = 1;
  std::uint64_t seed = 0;
};

/// mu_t = logistic(r_hat - epsilon), mu_c = o_hat. o_hat entries must be
/// probabilities; matrices must share dimensions.
std::pair<DenseMatrix, DenseMatrix> outcome_probabilities(const DenseMatrix& r_hat,
                                                          const DenseMatrix& o_hat,
                                                          double epsilon);

/// P[u][i] = min(1, a * (1 / rank_u(i))^b) where rank_u orders items by
/// mu_t + mu_c descending, ties by ascending item index, 1-based.
DenseMatrix propensities(const DenseMatrix& mu_t, const DenseMatrix& mu_c, double a, double b);

/// Finds a > 0 such that the mean over users of sum_i P[u][i] equals
/// target_recs_per_user, by bisection on the monotone saturating sum.
/// target must be in (0, n_items].
double calibrate_a(const DenseMatrix& mu_t, const DenseMatrix& mu_c, double b,
                   double target_recs_per_user);

/// One split: y_t ~ Bernoulli(mu_t), y_c ~ Bernoulli(mu_c),
/// z ~ Bernoulli(P), each cell from its own counter-based stream keyed by
/// (seed, split_label, replicate, variable, user, item); then
/// y = z * y_t + (1 - z) * y_c and tau = y_t - y_c. Identical keys give
/// identical datasets under any worker count.
GeneratedDataset sample_split(const PriorTables& priors, std::uint64_t seed,
                              const std::string& split_label, std::uint64_t replicate = 0);

/// Seeded low-rank stand-in for externally trained prior models: predicted
/// ratings r_hat in [1, 5] and exposure probabilities o_hat in [0, 1],
/// shaped so that after outcome_probabilities with epsilon = 5 the treated
/// probability exceeds the control probability on most pairs.
std::pair<DenseMatrix, DenseMatrix> synth_priors(std::size_t n_users, std::size_t n_items,
                                                 std::uint64_t seed);

struct DatasetBundle {
  std::vector<GeneratedDataset> train;
  std::vector<GeneratedDataset> validation;
  std::vector<GeneratedDataset> test;
};

/// Full generation pipeline from prior matrices: outcome probabilities,
/// propensity calibration, and independent sampling of every split
/// replicate. Generation parameters are recorded in each dataset's params.
DatasetBundle generate_splits(const DenseMatrix& r_hat, const DenseMatrix& o_hat,
                              const GenParams& params);

}  // namespace cnrank
