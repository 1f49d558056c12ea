#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cnrank {

/// Observational study panel: one binary outcome and treatment per subject
/// plus a binary covariate vector used for matching.
struct SubjectPanel {
  std::vector<std::uint8_t> y;
  std::vector<std::uint8_t> z;
  std::vector<std::vector<std::uint32_t>> covariates;  // sorted feature indices
  std::size_t n_features = 0;
  std::vector<std::string> ids;  // optional external ids

  std::size_t n_subjects() const { return y.size(); }

  /// Throws std::invalid_argument on misaligned lengths, non-binary y/z, or
  /// covariate indices that are unsorted, duplicated, or out of range.
  void validate() const;
};

/// Matched treated and control subjects for every subject.
struct MatchedSets {
  std::vector<std::vector<std::uint32_t>> treated;
  std::vector<std::vector<std::uint32_t>> control;
};

/// For each subject, picks the m most covariate-similar treated subjects and
/// the m most similar controls (cosine descending, ties by ascending index).
/// A subject can match itself within its own group. When a group has fewer
/// than m members the whole group is taken. Throws when m >= 1 and either
/// group is empty.
MatchedSets match_subjects(const SubjectPanel& panel, std::size_t m);

struct CounterfactualEstimates {
  std::vector<double> y_t_hat;
  std::vector<double> y_c_hat;
};

/// Plain means of observed outcomes over the matched sets. Throws when a
/// matched set is empty.
CounterfactualEstimates estimate_counterfactuals(const SubjectPanel& panel,
                                                 const MatchedSets& matches);

/// tau_hat_n = z_n (y_n - y_c_hat_n) + (1 - z_n)(y_t_hat_n - y_n).
std::vector<double> per_subject_effect(const SubjectPanel& panel,
                                       const CounterfactualEstimates& estimates);

enum class AggregateMode { ate, att };

/// Mean effect over all subjects (ate) or over treated subjects only (att).
/// Throws on an empty subject set, or for att with no treated subjects.
double aggregate(const std::vector<double>& effects, AggregateMode mode,
                 const std::vector<std::uint8_t>& z);

/// Reads a panel from CSV with header columns id, z, y; every remaining
/// column is a binary covariate. Errors name the offending line.
SubjectPanel load_panel_csv(const std::filesystem::path& path);

}  // namespace cnrank
