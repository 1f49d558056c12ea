#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cnrank/dataset.hpp"
#include "cnrank/ranking.hpp"
#include "cnrank/sparse.hpp"

namespace cnrank {

/// Causal ranking metrics, each averaged over users. All of them can be
/// negative since tau has negative entries.
struct MetricReport {
  std::vector<std::size_t> cutoffs;
  std::vector<double> cp_at;  // aligned with cutoffs
  double cdcg = 0.0;
  double car = 0.0;

  // Filled only when evaluate is asked for the per-user breakdown.
  std::vector<std::vector<double>> per_user_cp;  // [cutoff][user]
  std::vector<double> per_user_cdcg;
  std::vector<double> per_user_car;
};

/// Mean over users of sum(tau over the top-n ranked items) / n.
double cp_at_n(const RankedLists& rankings, const SparseTernaryMatrix& tau, std::size_t n);

/// Mean over users of sum(tau_ui / log2(1 + rank_u(i))) over all items.
double cdcg(const RankedLists& rankings, const SparseTernaryMatrix& tau);

/// Mean over users of (1/I) * sum(rank_u(i) * tau_ui); smaller is better.
double car(const RankedLists& rankings, const SparseTernaryMatrix& tau);

/// All metrics against the ground-truth tau of a dataset. Rankings must
/// cover every user and rank every item; violations raise errors naming the
/// missing users or the item shortfall.
MetricReport evaluate(const RankedLists& rankings, const GeneratedDataset& dataset,
                      std::span<const std::size_t> cutoffs, bool per_user = false);

/// Same metrics directly against a tau matrix.
MetricReport evaluate_against(const RankedLists& rankings, const SparseTernaryMatrix& tau,
                              std::span<const std::size_t> cutoffs, bool per_user = false);

/// Two-column CSV (metric,value) with rows cp@n per cutoff, cdcg, car.
void save_report_csv(const std::filesystem::path& path, const MetricReport& report);

/// JSON object {"cp": [{"n":..,"value":..},..], "cdcg":.., "car":..} plus a
/// "per_user" object when the breakdown is present.
void save_report_json(const std::filesystem::path& path, const MetricReport& report);

/// Per-user table (user,cp@n..,cdcg,car). Requires the breakdown.
void save_per_user_csv(const std::filesystem::path& path, const MetricReport& report);

}  // namespace cnrank
