// Microbenchmarks for the hot paths: candidate search, the full causal
// ranking pipeline, the amortized shrinkage sweep, and metric evaluation.
// Datasets are generated once per shape and shared across iterations.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "cnrank/baselines.hpp"
#include "cnrank/causal_neighbors.hpp"
#include "cnrank/datagen.hpp"
#include "cnrank/harness.hpp"
#include "cnrank/metrics.hpp"
#include "cnrank/similarity.hpp"

using namespace cnrank;

namespace {

const ExperimentData& demo_data(std::size_t n_users, std::size_t n_items) {
  static std::map<std::pair<std::size_t, std::size_t>, ExperimentData> cache;
  const auto [it, inserted] = cache.try_emplace({n_users, n_items});
  if (inserted) {
    const auto [r_hat, o_hat] = synth_priors(n_users, n_items, 1);
    GenParams params;
    params.target_recs_per_user = static_cast<double>(n_items) / 10.0;
    params.seed = 1;
    DatasetBundle bundle = generate_splits(r_hat, o_hat, params);
    it->second = ExperimentData{std::move(bundle.train[0]), std::move(bundle.validation[0]),
                                std::move(bundle.test[0])};
  }
  return it->second;
}

std::size_t clamp_k(std::size_t k, std::size_t population) {
  return std::min(k, population - 1);
}

void candidate_search(benchmark::State& state) {
  const ExperimentData& data =
      demo_data(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const std::size_t k_max = clamp_k(100, data.train.n_users());
  for (auto _ : state) {
    const NeighborCandidates candidates = compute_candidates(data.train.y, k_max);
    benchmark::DoNotOptimize(candidates.rows.size());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(data.train.n_users()));
}

void causal_ranking(benchmark::State& state) {
  const ExperimentData& data =
      demo_data(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  RankerConfig cfg;
  cfg.sim.k = clamp_k(50, data.train.n_users());
  cfg.sim.alpha = 1.0;
  cfg.beta_t = 1.0;
  cfg.beta_c = 1.0;
  for (auto _ : state) {
    const RankedLists lists = run_ranker(data.train.y, data.train.z, cfg);
    benchmark::DoNotOptimize(lists.items.size());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(data.train.n_users()));
}

void shrinkage_sweep(benchmark::State& state) {
  const ExperimentData& data =
      demo_data(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const std::size_t k = clamp_k(50, data.train.n_users());
  const NeighborCandidates candidates = compute_candidates(data.train.y, k);
  std::vector<NeighborSet> sets;
  sets.reserve(data.train.n_users());
  for (std::uint32_t u = 0; u < data.train.n_users(); ++u)
    sets.push_back(take_neighbors(candidates, u, k, 1.0, true));

  const std::vector<std::pair<double, double>> betas = {
      {0.0, 0.0}, {0.3, 0.3}, {1.0, 1.0}, {3.0, 3.0}, {10.0, 10.0}, {30.0, 30.0}, {100.0, 100.0}};
  for (auto _ : state) {
    sweep_shrinkage(data.train.y, data.train.z, sets, Orientation::user, betas,
                    [](std::size_t, std::size_t, std::span<const double> tau_row) {
                      benchmark::DoNotOptimize(tau_row.data());
                    });
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(data.train.n_users() * betas.size()));
}

void effect_metrics(benchmark::State& state) {
  const ExperimentData& data =
      demo_data(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const RankedLists lists = rank_pop(data.train.y);
  const std::size_t cutoffs[] = {10, 30};
  for (auto _ : state) {
    const MetricReport report = evaluate_against(lists, data.test.tau, cutoffs);
    benchmark::DoNotOptimize(report.car);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(data.train.n_users()));
}

void dataset_generation(benchmark::State& state) {
  const std::size_t n_users = static_cast<std::size_t>(state.range(0));
  const std::size_t n_items = static_cast<std::size_t>(state.range(1));
  const auto [r_hat, o_hat] = synth_priors(n_users, n_items, 1);
  GenParams params;
  params.target_recs_per_user = static_cast<double>(n_items) / 10.0;
  params.seed = 1;
  for (auto _ : state) {
    const DatasetBundle bundle = generate_splits(r_hat, o_hat, params);
    benchmark::DoNotOptimize(bundle.train.size());
  }
}

BENCHMARK(candidate_search)->Args({200, 120})->Args({500, 300});
BENCHMARK(causal_ranking)->Args({200, 120})->Args({500, 300});
BENCHMARK(shrinkage_sweep)->Args({200, 120})->Args({500, 300});
BENCHMARK(effect_metrics)->Args({200, 120})->Args({500, 300});
BENCHMARK(dataset_generation)->Args({200, 120});

}  // namespace

BENCHMARK_MAIN();
