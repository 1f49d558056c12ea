#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cnrank/sparse.hpp"

namespace cnrank {

/// Per-pair probability tables driving the generator: treated and control
/// outcome probabilities plus recommendation propensities.
struct PriorTables {
  DenseMatrix mu_t;
  DenseMatrix mu_c;
  DenseMatrix propensity;

  /// Throws std::invalid_argument on dimension mismatch or entries
  /// outside [0, 1].
  void validate() const;
};

/// One generated split: potential outcomes, assignments, observed outcomes,
/// and the ground-truth per-pair effect tau = y_t - y_c.
struct GeneratedDataset {
  SparseBinaryMatrix y_t;
  SparseBinaryMatrix y_c;
  SparseBinaryMatrix z;
  SparseBinaryMatrix y;
  SparseTernaryMatrix tau;
  std::uint64_t seed = 0;
  std::string split_label;               // train, validation, or test
  std::map<std::string, double> params;  // generation parameters, by name
  std::vector<std::string> user_ids;     // optional external ids
  std::vector<std::string> item_ids;

  std::size_t n_users() const { return y.n_rows(); }
  std::size_t n_items() const { return y.n_cols(); }

  /// Average treatment effect over all user-item cells.
  double ate() const { return tau.mean(); }

  /// Checks shapes, the split label, the observed-outcome identity
  /// y = z*y_t + (1-z)*y_c, and tau = y_t - y_c. Throws on violation.
  void validate() const;
};

/// Writes the five matrices as triplet files plus manifest.json into dir
/// (created if absent). Returns the manifest path. Output bytes depend only
/// on the dataset contents.
std::filesystem::path save_dataset(const GeneratedDataset& ds, const std::filesystem::path& dir);

/// Inverse of save_dataset. Validates the loaded dataset before returning.
GeneratedDataset load_dataset(const std::filesystem::path& dir);

}  // namespace cnrank
