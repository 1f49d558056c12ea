#include "cnrank/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cnrank/parallel.hpp"
#include "cnrank/ranking.hpp"
#include "cnrank/rng.hpp"

namespace cnrank {

namespace {

constexpr std::size_t kLatentDim = 8;

// Shaping constants for the synthetic priors. The rating map is tuned so
// that logistic(r_hat - 5) lands mostly above the exposure probabilities,
// keeping the treated outcome more likely than the control one on most
// pairs while both stay heterogeneous across users and items.
constexpr double kRatingShift = 0.05;
constexpr double kRatingRange = 0.32;
constexpr double kExposureShift = 0.10;
constexpr double kExposureRange = 0.32;
constexpr double kExposureCeiling = 0.12;

void check_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols()) {
    throw std::invalid_argument(std::string(what) + " matrices have different shapes");
  }
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

/// Expected recommendations per user: sum over ranks of min(1, a * r^-b).
/// Every user ranks all items, so the per-user sum is rank-multiset
/// invariant and this single sum equals the mean over users.
double expected_recs(double a, const std::vector<double>& rank_weights) {
  double sum = 0.0;
  for (double w : rank_weights) sum += std::min(1.0, a * w);
  return sum;
}

std::vector<double> make_rank_weights(std::size_t n_items, double b) {
  std::vector<double> weights(n_items);
  for (std::size_t r = 1; r <= n_items; ++r) {
    weights[r - 1] = std::pow(1.0 / static_cast<double>(r), b);
  }
  return weights;
}

/// Low-rank affinity in [0, 1): mean dot product of per-entity factor rows.
DenseMatrix factor_affinity(std::size_t n_users, std::size_t n_items, rng::Key base,
                            std::string_view user_tag, std::string_view item_tag) {
  std::vector<double> user_factors(n_users * kLatentDim);
  std::vector<double> item_factors(n_items * kLatentDim);
  for (std::size_t u = 0; u < n_users; ++u) {
    const rng::Key row = base.with(user_tag).with(u);
    for (std::size_t f = 0; f < kLatentDim; ++f) {
      user_factors[u * kLatentDim + f] = rng::uniform(row.with(f));
    }
  }
  for (std::size_t i = 0; i < n_items; ++i) {
    const rng::Key row = base.with(item_tag).with(i);
    for (std::size_t f = 0; f < kLatentDim; ++f) {
      item_factors[i * kLatentDim + f] = rng::uniform(row.with(f));
    }
  }

  DenseMatrix affinity(n_users, n_items);
  parallel_for(n_users, [&](std::size_t u) {
    const double* pu = user_factors.data() + u * kLatentDim;
    const std::span<double> row = affinity.row(u);
    for (std::size_t i = 0; i < n_items; ++i) {
      const double* qi = item_factors.data() + i * kLatentDim;
      double dot = 0.0;
      for (std::size_t f = 0; f < kLatentDim; ++f) dot += pu[f] * qi[f];
      row[i] = dot / static_cast<double>(kLatentDim);
    }
  });
  return affinity;
}

}  // namespace

std::pair<DenseMatrix, DenseMatrix> outcome_probabilities(const DenseMatrix& r_hat,
                                                          const DenseMatrix& o_hat,
                                                          double epsilon) {
  check_same_shape(r_hat, o_hat, "prior");
  DenseMatrix mu_t(r_hat.n_rows(), r_hat.n_cols());
  for (std::size_t u = 0; u < r_hat.n_rows(); ++u) {
    for (std::size_t i = 0; i < r_hat.n_cols(); ++i) {
      const double o = o_hat.at(u, i);
      if (!(o >= 0.0 && o <= 1.0)) {
        throw std::invalid_argument("exposure prior out of [0,1] at (" + std::to_string(u) +
                                    ", " + std::to_string(i) + ")");
      }
      mu_t.at(u, i) = logistic(r_hat.at(u, i) - epsilon);
    }
  }
  return {std::move(mu_t), o_hat};
}

DenseMatrix propensities(const DenseMatrix& mu_t, const DenseMatrix& mu_c, double a, double b) {
  check_same_shape(mu_t, mu_c, "outcome probability");
  if (!(a > 0.0)) throw std::invalid_argument("propensity scale a must be positive");
  if (b < 0.0) throw std::invalid_argument("unevenness b must be nonnegative");

  const std::size_t n_items = mu_t.n_cols();
  const std::vector<double> rank_weights = make_rank_weights(n_items, b);
  DenseMatrix propensity(mu_t.n_rows(), n_items);
  parallel_for(mu_t.n_rows(), [&](std::size_t u) {
    thread_local std::vector<double> preference;
    preference.resize(n_items);
    for (std::size_t i = 0; i < n_items; ++i) {
      preference[i] = mu_t.at(u, i) + mu_c.at(u, i);
    }
    const std::vector<std::uint32_t> order = rank_row(preference);
    const std::span<double> row = propensity.row(u);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      row[order[pos]] = std::min(1.0, a * rank_weights[pos]);
    }
  });
  return propensity;
}

double calibrate_a(const DenseMatrix& mu_t, const DenseMatrix& mu_c, double b,
                   double target_recs_per_user) {
  check_same_shape(mu_t, mu_c, "outcome probability");
  if (b < 0.0) throw std::invalid_argument("unevenness b must be nonnegative");
  const std::size_t n_items = mu_t.n_cols();
  if (!(target_recs_per_user > 0.0)) {
    throw std::invalid_argument("target recommendations per user must be positive");
  }
  if (target_recs_per_user > static_cast<double>(n_items)) {
    throw std::invalid_argument("target of " + std::to_string(target_recs_per_user) +
                                " recommendations per user exceeds the item count " +
                                std::to_string(n_items));
  }

  const std::vector<double> rank_weights = make_rank_weights(n_items, b);
  double hi = 1.0;
  for (int round = 0; round < 200 && expected_recs(hi, rank_weights) < target_recs_per_user;
       ++round) {
    hi *= 2.0;
  }
  double lo = 0.0;
  for (int round = 0; round < 200; ++round) {
    const double mid = 0.5 * (lo + hi);
    if (expected_recs(mid, rank_weights) < target_recs_per_user) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

GeneratedDataset sample_split(const PriorTables& priors, std::uint64_t seed,
                              const std::string& split_label, std::uint64_t replicate) {
  priors.validate();
  if (split_label != "train" && split_label != "validation" && split_label != "test") {
    throw std::invalid_argument("invalid split label: '" + split_label + "'");
  }

  const std::size_t n_users = priors.mu_t.n_rows();
  const std::size_t n_items = priors.mu_t.n_cols();
  const rng::Key base = rng::Key(seed).with(split_label).with(replicate);

  std::vector<std::vector<std::uint32_t>> rows_t(n_users);
  std::vector<std::vector<std::uint32_t>> rows_c(n_users);
  std::vector<std::vector<std::uint32_t>> rows_z(n_users);
  std::vector<std::vector<std::uint32_t>> rows_y(n_users);
  parallel_for(n_users, [&](std::size_t u) {
    const rng::Key row_t = base.with("y_t").with(u);
    const rng::Key row_c = base.with("y_c").with(u);
    const rng::Key row_z = base.with("z").with(u);
    for (std::uint32_t i = 0; i < n_items; ++i) {
      const bool y_t = rng::bernoulli(row_t.with(i), priors.mu_t.at(u, i));
      const bool y_c = rng::bernoulli(row_c.with(i), priors.mu_c.at(u, i));
      const bool z = rng::bernoulli(row_z.with(i), priors.propensity.at(u, i));
      if (y_t) rows_t[u].push_back(i);
      if (y_c) rows_c[u].push_back(i);
      if (z) rows_z[u].push_back(i);
      if (z ? y_t : y_c) rows_y[u].push_back(i);
    }
  });

  GeneratedDataset ds;
  ds.y_t = SparseBinaryMatrix(n_users, n_items, rows_t);
  ds.y_c = SparseBinaryMatrix(n_users, n_items, rows_c);
  ds.z = SparseBinaryMatrix(n_users, n_items, rows_z);
  ds.y = SparseBinaryMatrix(n_users, n_items, rows_y);
  ds.tau = SparseTernaryMatrix::difference(ds.y_t, ds.y_c);
  ds.seed = seed;
  ds.split_label = split_label;
  return ds;
}

std::pair<DenseMatrix, DenseMatrix> synth_priors(std::size_t n_users, std::size_t n_items,
                                                 std::uint64_t seed) {
  if (n_users == 0 || n_items == 0) {
    throw std::invalid_argument("prior dimensions must be positive");
  }
  const rng::Key base(seed);
  const DenseMatrix rating = factor_affinity(n_users, n_items, base, "rating-user",
                                             "rating-item");
  const DenseMatrix exposure = factor_affinity(n_users, n_items, base, "exposure-user",
                                               "exposure-item");

  DenseMatrix r_hat(n_users, n_items);
  DenseMatrix o_hat(n_users, n_items);
  for (std::size_t u = 0; u < n_users; ++u) {
    for (std::size_t i = 0; i < n_items; ++i) {
      r_hat.at(u, i) = 1.0 + 4.0 * clamp01((rating.at(u, i) - kRatingShift) / kRatingRange);
      o_hat.at(u, i) =
          kExposureCeiling * clamp01((exposure.at(u, i) - kExposureShift) / kExposureRange);
    }
  }
  return {std::move(r_hat), std::move(o_hat)};
}

DatasetBundle generate_splits(const DenseMatrix& r_hat, const DenseMatrix& o_hat,
                              const GenParams& params) {
  auto [mu_t, mu_c] = outcome_probabilities(r_hat, o_hat, params.epsilon);
  double a;
  if (params.a) {
    a = *params.a;
    if (!(a > 0.0)) throw std::invalid_argument("propensity scale a must be positive");
  } else {
    a = calibrate_a(mu_t, mu_c, params.b, params.target_recs_per_user);
  }

  PriorTables priors;
  priors.propensity = propensities(mu_t, mu_c, a, params.b);
  priors.mu_t = std::move(mu_t);
  priors.mu_c = std::move(mu_c);

  std::map<std::string, double> base_params = {
      {"epsilon", params.epsilon},
      {"a", a},
      {"b", params.b},
      {"target_recs_per_user", params.target_recs_per_user},
  };

  DatasetBundle bundle;
  const struct {
    const char* label;
    std::size_t count;
    std::vector<GeneratedDataset>* out;
  } splits[] = {
      {"train", params.n_train, &bundle.train},
      {"validation", params.n_validation, &bundle.validation},
      {"test", params.n_test, &bundle.test},
  };
  for (const auto& split : splits) {
    for (std::size_t r = 0; r < split.count; ++r) {
      GeneratedDataset ds = sample_split(priors, params.seed, split.label, r);
      ds.params = base_params;
      ds.params["replicate"] = static_cast<double>(r);
      split.out->push_back(std::move(ds));
    }
  }
  return bundle;
}

}  // namespace cnrank
