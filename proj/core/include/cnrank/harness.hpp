#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cnrank/datagen.hpp"
#include "cnrank/dataset.hpp"
#include "cnrank/similarity.hpp"

namespace cnrank {

/// Rankers the experiment driver knows how to run. The causal neighborhood
/// methods come in user/item orientations, outcome/treatment similarity
/// sources, and with or without own-observation mixing.
enum class HarnessMethod {
  cubn_o,
  cubn_t,
  cibn_o,
  cibn_t,
  cubn_o_wom,
  cubn_t_wom,
  cibn_o_wom,
  cibn_t_wom,
  ubn,
  ibn,
  random,
  pop,
};

std::string method_name(HarnessMethod method);
HarnessMethod parse_method(const std::string& name);

/// Static properties of a method: which hyperparameter dimensions it has
/// and how it is configured. random and pop have no neighbor dimension.
struct MethodDescription {
  bool neighbor = false;  // uses k and alpha
  bool causal = false;    // estimates effects rather than outcomes
  bool mix_own = false;   // mixing variant, uses the betas
  Orientation orientation = Orientation::user;
  SimilaritySource source = SimilaritySource::outcomes;
};

MethodDescription describe_method(HarnessMethod method);

/// Experiment description: methods, hyperparameter grids, metric targets,
/// dataset locations, and generator settings for sweeps that regenerate
/// data. Neighbor counts exceeding the population are dropped per method.
struct SweepSpec {
  std::vector<HarnessMethod> methods = {HarnessMethod::cubn_o, HarnessMethod::ubn,
                                        HarnessMethod::random, HarnessMethod::pop};
  std::vector<std::size_t> k_grid = {10, 30, 100, 300, 1000, 3000, 10000};
  std::vector<double> alpha_grid = {0.33, 0.5, 1.0, 2.0, 3.0, 5.0};
  std::vector<double> beta_grid = {0.0, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0};
  std::vector<std::string> metrics = {"cp@10", "cdcg", "car"};
  std::filesystem::path train_dir;
  std::filesystem::path validation_dir;
  std::filesystem::path test_dir;
  std::uint64_t seed = 0;

  // Generator settings for the unevenness and log-size sweeps.
  std::size_t n_users = 500;
  std::size_t n_items = 300;
  GenParams gen;
  std::vector<double> unevenness_grid = {0.5, 1.0, 2.0};
  std::vector<double> log_size_grid = {10.0, 30.0, 100.0};
};

/// JSON sweep description; unknown keys are rejected.
SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// One selected configuration: the validation winner for one method and one
/// target metric, with its test metrics. Wall time is informational and is
/// never written to output files, which must stay byte-deterministic.
struct RunRecord {
  std::string method;
  std::string metric;
  std::size_t k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double validation_value = 0.0;
  std::vector<std::pair<std::string, double>> test_metrics;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

struct ExperimentData {
  GeneratedDataset train;
  GeneratedDataset validation;
  GeneratedDataset test;
};

/// For every method and target metric: rankings are built from the training
/// split for every grid point, scored against the validation split's
/// ground-truth effects, and the best point (max, or min for car) is
/// reported with its test metrics. Grid-order ties-to-first selection.
std::vector<RunRecord> run_experiment(const SweepSpec& spec, const ExperimentData& data);

/// Loads the three splits from the spec's dataset directories first.
std::vector<RunRecord> run_experiment(const SweepSpec& spec);

enum class SweepKind { neighbors, alpha_beta, unevenness, log_size };

std::string sweep_kind_name(SweepKind kind);
SweepKind parse_sweep_kind(const std::string& name);

/// One sweep point for one method, with one cell per target metric.
struct SweepRow {
  struct MetricCell {
    std::string metric;
    double value = 0.0;  // validation value (neighbors, alpha_beta) or test value
    std::size_t k = 0;   // config behind the value
    double alpha = 0.0;
    double beta = 0.0;
  };

  std::string kind;
  std::string method;
  double sweep_value = 0.0;  // k, alpha, b, or target recommendations per user
  double beta = 0.0;         // second coordinate of the alpha_beta sweep
  std::vector<MetricCell> cells;
};

/// Sensitivity experiments:
///  - neighbors: per usable k, the best validation value per metric with
///    alpha and beta re-optimized at that k;
///  - alpha_beta: validation values over the full alpha x beta grid at the
///    largest usable neighbor count (mixing methods only);
///  - unevenness / log_size: regenerate the datasets per point (seeds
///    derived from the base seed), tune on validation, report test values.
std::vector<SweepRow> sensitivity_sweep(SweepKind kind, const SweepSpec& spec,
                                        const ExperimentData& data);

/// Regenerating kinds only (unevenness, log_size); data-driven kinds need
/// the overload with ExperimentData.
std::vector<SweepRow> sensitivity_sweep(SweepKind kind, const SweepSpec& spec);

/// records.csv plus one CSV and one aligned-text comparison table per
/// target metric, best test value flagged. Deterministic bytes.
void emit_tables(const std::vector<RunRecord>& records, const std::filesystem::path& dir);

/// Plot-ready CSV of sweep rows, one line per (row, metric cell).
void save_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace cnrank
