#include "cnrank/harness.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "cnrank/baselines.hpp"
#include "cnrank/causal_neighbors.hpp"
#include "cnrank/metrics.hpp"
#include "cnrank/rng.hpp"
#include "cnrank/similarity.hpp"

namespace cnrank {
namespace {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string format_short(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

constexpr std::array<std::pair<HarnessMethod, const char*>, 12> kMethodNames{{
    {HarnessMethod::cubn_o, "cubn-o"},
    {HarnessMethod::cubn_t, "cubn-t"},
    {HarnessMethod::cibn_o, "cibn-o"},
    {HarnessMethod::cibn_t, "cibn-t"},
    {HarnessMethod::cubn_o_wom, "cubn-o-wom"},
    {HarnessMethod::cubn_t_wom, "cubn-t-wom"},
    {HarnessMethod::cibn_o_wom, "cibn-o-wom"},
    {HarnessMethod::cibn_t_wom, "cibn-t-wom"},
    {HarnessMethod::ubn, "ubn"},
    {HarnessMethod::ibn, "ibn"},
    {HarnessMethod::random, "random"},
    {HarnessMethod::pop, "pop"},
}};

MethodDescription traits_of(HarnessMethod method) {
  using M = HarnessMethod;
  switch (method) {
    case M::cubn_o:
      return {true, true, true, Orientation::user, SimilaritySource::outcomes};
    case M::cubn_t:
      return {true, true, true, Orientation::user, SimilaritySource::treatments};
    case M::cibn_o:
      return {true, true, true, Orientation::item, SimilaritySource::outcomes};
    case M::cibn_t:
      return {true, true, true, Orientation::item, SimilaritySource::treatments};
    case M::cubn_o_wom:
      return {true, true, false, Orientation::user, SimilaritySource::outcomes};
    case M::cubn_t_wom:
      return {true, true, false, Orientation::user, SimilaritySource::treatments};
    case M::cibn_o_wom:
      return {true, true, false, Orientation::item, SimilaritySource::outcomes};
    case M::cibn_t_wom:
      return {true, true, false, Orientation::item, SimilaritySource::treatments};
    case M::ubn:
      return {true, false, false, Orientation::user, SimilaritySource::outcomes};
    case M::ibn:
      return {true, false, false, Orientation::item, SimilaritySource::outcomes};
    case M::random:
    case M::pop:
      return {};
  }
  throw std::logic_error("unhandled method");
}

struct MetricSpec {
  std::string name;
  bool is_cp = false;
  std::size_t cutoff = 0;
  bool minimize = false;
};

MetricSpec parse_metric(const std::string& name) {
  MetricSpec spec;
  spec.name = name;
  if (name == "cdcg") return spec;
  if (name == "car") {
    spec.minimize = true;
    return spec;
  }
  if (name.rfind("cp@", 0) == 0) {
    const std::string digits = name.substr(3);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos ||
        digits.size() > 9)
      throw std::invalid_argument("bad cutoff in metric '" + name + "'");
    spec.is_cp = true;
    spec.cutoff = static_cast<std::size_t>(std::stoull(digits));
    if (spec.cutoff == 0) throw std::invalid_argument("metric cutoff must be positive: " + name);
    return spec;
  }
  throw std::invalid_argument("unknown metric '" + name + "' (expected cp@N, cdcg, or car)");
}

std::vector<MetricSpec> parse_metrics(const std::vector<std::string>& names) {
  if (names.empty()) throw std::invalid_argument("no metrics configured");
  std::vector<MetricSpec> specs;
  specs.reserve(names.size());
  for (const auto& name : names) specs.push_back(parse_metric(name));
  return specs;
}

std::vector<std::size_t> cp_cutoffs(const std::vector<MetricSpec>& specs) {
  std::vector<std::size_t> cutoffs;
  for (const auto& spec : specs)
    if (spec.is_cp && std::find(cutoffs.begin(), cutoffs.end(), spec.cutoff) == cutoffs.end())
      cutoffs.push_back(spec.cutoff);
  return cutoffs;
}

double metric_value(const MetricReport& report, const MetricSpec& spec) {
  if (spec.is_cp) {
    const auto it = std::find(report.cutoffs.begin(), report.cutoffs.end(), spec.cutoff);
    if (it == report.cutoffs.end())
      throw std::logic_error("cutoff missing from report: " + spec.name);
    return report.cp_at[static_cast<std::size_t>(it - report.cutoffs.begin())];
  }
  return spec.name == "car" ? report.car : report.cdcg;
}

struct GridPoint {
  std::size_t k = 0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct PointEval {
  GridPoint pt;
  std::vector<double> values;  // aligned with the metric specs
};

std::vector<std::size_t> usable_neighbor_counts(const std::vector<std::size_t>& grid,
                                                std::size_t population) {
  std::vector<std::size_t> counts;
  const std::size_t bound = population == 0 ? 0 : population - 1;
  for (const std::size_t k : grid)
    if (k <= bound) counts.push_back(k);
  return counts;
}

RankedLists build_rankings(HarnessMethod method, const SweepSpec& spec,
                           const ExperimentData& data, const GridPoint& pt) {
  const MethodDescription traits = traits_of(method);
  const GeneratedDataset& train = data.train;
  switch (method) {
    case HarnessMethod::random:
      return rank_random(train.n_users(), train.n_items(), spec.seed);
    case HarnessMethod::pop:
      return rank_pop(train.y);
    case HarnessMethod::ubn:
    case HarnessMethod::ibn: {
      SimilarityConfig sim{pt.k, pt.alpha, SimilaritySource::outcomes, traits.orientation};
      return rank_ubn_ibn(train.y, sim);
    }
    default: {
      RankerConfig cfg;
      cfg.sim = SimilarityConfig{pt.k, pt.alpha, traits.source, traits.orientation};
      cfg.mix_own = traits.mix_own;
      if (traits.mix_own) {
        cfg.beta_t = pt.beta;
        cfg.beta_c = pt.beta;
      }
      return run_ranker(train.y, train.z, cfg);
    }
  }
}

/// Validation values for every grid point of one method, in declared grid
/// order (k, then alpha, then beta). Candidate neighbor lists are shared
/// across the grid and the beta dimension reuses per-user neighborhood sums.
std::vector<PointEval> grid_eval(HarnessMethod method, const SweepSpec& spec,
                                 const ExperimentData& data,
                                 const std::vector<MetricSpec>& specs,
                                 std::span<const std::size_t> cutoffs,
                                 const SparseTernaryMatrix& target,
                                 const std::vector<std::size_t>& k_grid,
                                 const std::vector<double>& alpha_grid,
                                 const std::vector<double>& beta_grid) {
  const MethodDescription traits = traits_of(method);
  std::vector<PointEval> evals;

  const auto record = [&](const GridPoint& pt, const RankedLists& lists) {
    const MetricReport report = evaluate_against(lists, target, cutoffs);
    PointEval eval;
    eval.pt = pt;
    eval.values.reserve(specs.size());
    for (const auto& spec_entry : specs) eval.values.push_back(metric_value(report, spec_entry));
    evals.push_back(std::move(eval));
  };

  if (!traits.neighbor) {
    record(GridPoint{}, build_rankings(method, spec, data, GridPoint{}));
    return evals;
  }

  const SparseBinaryMatrix& y = data.train.y;
  const SparseBinaryMatrix& z = data.train.z;
  const std::size_t population =
      traits.orientation == Orientation::user ? y.n_rows() : y.n_cols();
  const std::vector<std::size_t> counts = usable_neighbor_counts(k_grid, population);
  if (counts.empty())
    throw std::invalid_argument("no usable neighbor count for " + method_name(method) +
                                " with population " + std::to_string(population));
  if (alpha_grid.empty()) throw std::invalid_argument("empty alpha grid");
  const std::size_t k_max = *std::max_element(counts.begin(), counts.end());

  if (!traits.causal) {
    for (const std::size_t k : counts)
      for (const double alpha : alpha_grid) {
        SimilarityConfig sim{k, alpha, SimilaritySource::outcomes, traits.orientation};
        record(GridPoint{k, alpha, 0.0}, rank_ubn_ibn(y, sim));
      }
    return evals;
  }

  const SparseBinaryMatrix& source = traits.source == SimilaritySource::outcomes ? y : z;
  const SparseBinaryMatrix oriented =
      traits.orientation == Orientation::user ? source : source.transposed();
  const NeighborCandidates candidates = compute_candidates(oriented, k_max);

  const auto neighbor_sets = [&](std::size_t k, double alpha, bool include_self) {
    std::vector<NeighborSet> sets;
    sets.reserve(population);
    for (std::uint32_t row = 0; row < population; ++row)
      sets.push_back(take_neighbors(candidates, row, k, alpha, include_self));
    return sets;
  };

  if (!traits.mix_own) {
    for (const std::size_t k : counts)
      for (const double alpha : alpha_grid) {
        RankerConfig cfg;
        cfg.sim = SimilarityConfig{k, alpha, traits.source, traits.orientation};
        cfg.mix_own = false;
        record(GridPoint{k, alpha, 0.0},
               rank_with_neighbors(y, z, neighbor_sets(k, alpha, false), cfg));
      }
    return evals;
  }

  if (beta_grid.empty()) throw std::invalid_argument("empty beta grid");
  std::vector<std::pair<double, double>> beta_pairs;
  beta_pairs.reserve(beta_grid.size());
  for (const double beta : beta_grid) beta_pairs.emplace_back(beta, beta);

  const std::size_t n_users = y.n_rows();
  for (const std::size_t k : counts)
    for (const double alpha : alpha_grid) {
      const std::vector<NeighborSet> sets = neighbor_sets(k, alpha, true);
      std::vector<RankedLists> lists(beta_pairs.size());
      for (auto& entry : lists) {
        entry.n_items = y.n_cols();
        entry.items.resize(n_users);
        entry.scores.resize(n_users);
      }
      sweep_shrinkage(y, z, sets, traits.orientation, beta_pairs,
                      [&](std::size_t user, std::size_t beta_index,
                          std::span<const double> tau_row) {
                        lists[beta_index].items[user] = rank_row(tau_row);
                      });
      for (std::size_t bi = 0; bi < beta_pairs.size(); ++bi)
        record(GridPoint{k, alpha, beta_grid[bi]}, lists[bi]);
    }
  return evals;
}

std::size_t select_best(const std::vector<PointEval>& evals, std::size_t metric_index,
                        bool minimize) {
  if (evals.empty()) throw std::logic_error("empty grid evaluation");
  std::size_t best = 0;
  for (std::size_t i = 1; i < evals.size(); ++i) {
    const double value = evals[i].values[metric_index];
    const double incumbent = evals[best].values[metric_index];
    if (minimize ? value < incumbent : value > incumbent) best = i;
  }
  return best;
}

void check_shapes(const ExperimentData& data) {
  const auto same = [&](const GeneratedDataset& split) {
    return split.n_users() == data.train.n_users() && split.n_items() == data.train.n_items();
  };
  if (!same(data.validation) || !same(data.test))
    throw std::invalid_argument("splits disagree on the user-item universe");
}

GeneratedDataset load_split(const std::filesystem::path& dir, const char* which) {
  if (dir.empty())
    throw std::invalid_argument(std::string(which) + " dataset directory not set");
  try {
    return load_dataset(dir);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(which) + " split at '" + dir.string() +
                             "': " + e.what());
  }
}

std::string sanitize_metric(const std::string& name) {
  std::string out;
  for (const char c : name) {
    if (c == '@')
      out += "_at_";
    else if (std::isalnum(static_cast<unsigned char>(c)))
      out += c;
    else
      out += '_';
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string method_name(HarnessMethod method) {
  for (const auto& [value, name] : kMethodNames)
    if (value == method) return name;
  throw std::logic_error("unhandled method");
}

MethodDescription describe_method(HarnessMethod method) { return traits_of(method); }

HarnessMethod parse_method(const std::string& name) {
  for (const auto& [value, candidate] : kMethodNames)
    if (name == candidate) return value;
  std::string known;
  for (const auto& [value, candidate] : kMethodNames) {
    if (!known.empty()) known += ", ";
    known += candidate;
  }
  throw std::invalid_argument("unknown method '" + name + "' (expected one of " + known + ")");
}

std::string sweep_kind_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::neighbors:
      return "neighbors";
    case SweepKind::alpha_beta:
      return "alpha_beta";
    case SweepKind::unevenness:
      return "unevenness";
    case SweepKind::log_size:
      return "log_size";
  }
  throw std::logic_error("unhandled sweep kind");
}

SweepKind parse_sweep_kind(const std::string& name) {
  if (name == "neighbors") return SweepKind::neighbors;
  if (name == "alpha_beta") return SweepKind::alpha_beta;
  if (name == "unevenness") return SweepKind::unevenness;
  if (name == "log_size") return SweepKind::log_size;
  throw std::invalid_argument(
      "unknown sweep kind '" + name +
      "' (expected neighbors, alpha_beta, unevenness, or log_size)");
}

std::vector<RunRecord> run_experiment(const SweepSpec& spec, const ExperimentData& data) {
  if (spec.methods.empty()) throw std::invalid_argument("no methods configured");
  check_shapes(data);
  const std::vector<MetricSpec> specs = parse_metrics(spec.metrics);
  const std::vector<std::size_t> cutoffs = cp_cutoffs(specs);

  std::vector<RunRecord> records;
  for (const HarnessMethod method : spec.methods) {
    const auto started = std::chrono::steady_clock::now();
    const std::vector<PointEval> evals =
        grid_eval(method, spec, data, specs, cutoffs, data.validation.tau, spec.k_grid,
                  spec.alpha_grid, spec.beta_grid);
    std::vector<RunRecord> method_records;
    for (std::size_t mi = 0; mi < specs.size(); ++mi) {
      const std::size_t best = select_best(evals, mi, specs[mi].minimize);
      const GridPoint pt = evals[best].pt;
      const RankedLists lists = build_rankings(method, spec, data, pt);
      const MetricReport test_report = evaluate_against(lists, data.test.tau, cutoffs);

      RunRecord rec;
      rec.method = method_name(method);
      rec.metric = specs[mi].name;
      rec.k = pt.k;
      rec.alpha = pt.alpha;
      rec.beta = pt.beta;
      rec.validation_value = evals[best].values[mi];
      for (const auto& spec_entry : specs)
        rec.test_metrics.emplace_back(spec_entry.name, metric_value(test_report, spec_entry));
      rec.seed = spec.seed;
      method_records.push_back(std::move(rec));
    }
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    for (auto& rec : method_records) {
      rec.wall_ms = wall_ms;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::vector<RunRecord> run_experiment(const SweepSpec& spec) {
  ExperimentData data{load_split(spec.train_dir, "train"),
                      load_split(spec.validation_dir, "validation"),
                      load_split(spec.test_dir, "test")};
  return run_experiment(spec, data);
}

namespace {

std::vector<SweepRow> neighbors_sweep(const SweepSpec& spec, const ExperimentData& data) {
  check_shapes(data);
  const std::vector<MetricSpec> specs = parse_metrics(spec.metrics);
  const std::vector<std::size_t> cutoffs = cp_cutoffs(specs);

  std::vector<SweepRow> rows;
  for (const HarnessMethod method : spec.methods) {
    const MethodDescription traits = traits_of(method);
    if (!traits.neighbor) continue;
    const std::size_t population = traits.orientation == Orientation::user
                                       ? data.train.y.n_rows()
                                       : data.train.y.n_cols();
    for (const std::size_t k : usable_neighbor_counts(spec.k_grid, population)) {
      const std::vector<PointEval> evals =
          grid_eval(method, spec, data, specs, cutoffs, data.validation.tau, {k},
                    spec.alpha_grid, spec.beta_grid);
      SweepRow row;
      row.kind = sweep_kind_name(SweepKind::neighbors);
      row.method = method_name(method);
      row.sweep_value = static_cast<double>(k);
      for (std::size_t mi = 0; mi < specs.size(); ++mi) {
        const std::size_t best = select_best(evals, mi, specs[mi].minimize);
        const GridPoint pt = evals[best].pt;
        row.cells.push_back({specs[mi].name, evals[best].values[mi], pt.k, pt.alpha, pt.beta});
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SweepRow> alpha_beta_sweep(const SweepSpec& spec, const ExperimentData& data) {
  check_shapes(data);
  const std::vector<MetricSpec> specs = parse_metrics(spec.metrics);
  const std::vector<std::size_t> cutoffs = cp_cutoffs(specs);

  std::vector<SweepRow> rows;
  for (const HarnessMethod method : spec.methods) {
    const MethodDescription traits = traits_of(method);
    if (!traits.causal || !traits.mix_own) continue;
    const std::size_t population = traits.orientation == Orientation::user
                                       ? data.train.y.n_rows()
                                       : data.train.y.n_cols();
    if (population < 2)
      throw std::invalid_argument("population too small for the alpha_beta sweep");
    const std::size_t full_k = population - 1;
    const std::vector<PointEval> evals =
        grid_eval(method, spec, data, specs, cutoffs, data.validation.tau, {full_k},
                  spec.alpha_grid, spec.beta_grid);
    for (const PointEval& eval : evals) {
      SweepRow row;
      row.kind = sweep_kind_name(SweepKind::alpha_beta);
      row.method = method_name(method);
      row.sweep_value = eval.pt.alpha;
      row.beta = eval.pt.beta;
      for (std::size_t mi = 0; mi < specs.size(); ++mi)
        row.cells.push_back(
            {specs[mi].name, eval.values[mi], eval.pt.k, eval.pt.alpha, eval.pt.beta});
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SweepRow> regenerating_sweep(SweepKind kind, const SweepSpec& spec) {
  const std::vector<double>& grid =
      kind == SweepKind::unevenness ? spec.unevenness_grid : spec.log_size_grid;
  if (grid.empty()) throw std::invalid_argument("empty " + sweep_kind_name(kind) + " grid");
  const std::string label = sweep_kind_name(kind);

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double point = grid[i];
    const std::uint64_t point_seed = rng::derive_seed(spec.seed, label, i);

    GenParams params = spec.gen;
    params.seed = point_seed;
    params.a.reset();  // recalibrate at every point
    params.n_train = params.n_validation = params.n_test = 1;
    if (kind == SweepKind::unevenness)
      params.b = point;
    else
      params.target_recs_per_user = point;

    const auto [r_hat, o_hat] = synth_priors(spec.n_users, spec.n_items, point_seed);
    DatasetBundle bundle = generate_splits(r_hat, o_hat, params);
    const ExperimentData data{std::move(bundle.train[0]), std::move(bundle.validation[0]),
                              std::move(bundle.test[0])};

    SweepSpec point_spec = spec;
    point_spec.seed = point_seed;
    const std::vector<RunRecord> records = run_experiment(point_spec, data);

    for (const HarnessMethod method : spec.methods) {
      const std::string name = method_name(method);
      SweepRow row;
      row.kind = label;
      row.method = name;
      row.sweep_value = point;
      for (const RunRecord& rec : records) {
        if (rec.method != name) continue;
        double test_value = 0.0;
        for (const auto& [metric, value] : rec.test_metrics)
          if (metric == rec.metric) test_value = value;
        row.cells.push_back({rec.metric, test_value, rec.k, rec.alpha, rec.beta});
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> sensitivity_sweep(SweepKind kind, const SweepSpec& spec,
                                        const ExperimentData& data) {
  switch (kind) {
    case SweepKind::neighbors:
      return neighbors_sweep(spec, data);
    case SweepKind::alpha_beta:
      return alpha_beta_sweep(spec, data);
    case SweepKind::unevenness:
    case SweepKind::log_size:
      throw std::invalid_argument(sweep_kind_name(kind) +
                                  " regenerates its datasets; call the overload without data");
  }
  throw std::logic_error("unhandled sweep kind");
}

std::vector<SweepRow> sensitivity_sweep(SweepKind kind, const SweepSpec& spec) {
  switch (kind) {
    case SweepKind::neighbors:
    case SweepKind::alpha_beta: {
      const ExperimentData data{load_split(spec.train_dir, "train"),
                                load_split(spec.validation_dir, "validation"),
                                load_split(spec.test_dir, "test")};
      return sensitivity_sweep(kind, spec, data);
    }
    case SweepKind::unevenness:
    case SweepKind::log_size:
      return regenerating_sweep(kind, spec);
  }
  throw std::logic_error("unhandled sweep kind");
}

void emit_tables(const std::vector<RunRecord>& records, const std::filesystem::path& dir) {
  if (records.empty()) throw std::invalid_argument("no run records to emit");
  std::filesystem::create_directories(dir);

  const auto& first_metrics = records.front().test_metrics;
  for (const auto& rec : records) {
    if (rec.test_metrics.size() != first_metrics.size())
      throw std::invalid_argument("records disagree on the metric set");
    for (std::size_t i = 0; i < first_metrics.size(); ++i)
      if (rec.test_metrics[i].first != first_metrics[i].first)
        throw std::invalid_argument("records disagree on the metric set");
  }

  {
    std::ofstream out = open_output(dir / "records.csv");
    out << "method,metric,k,alpha,beta,validation";
    for (const auto& [name, value] : first_metrics) out << ",test_" << name;
    out << ",seed\n";
    for (const auto& rec : records) {
      out << rec.method << ',' << rec.metric << ',' << rec.k << ','
          << format_double(rec.alpha) << ',' << format_double(rec.beta) << ','
          << format_double(rec.validation_value);
      for (const auto& [name, value] : rec.test_metrics) out << ',' << format_double(value);
      out << ',' << rec.seed << '\n';
    }
  }

  std::vector<std::string> targets;
  for (const auto& rec : records)
    if (std::find(targets.begin(), targets.end(), rec.metric) == targets.end())
      targets.push_back(rec.metric);

  for (const auto& target : targets) {
    const bool minimize = parse_metric(target).minimize;

    struct TableRow {
      const RunRecord* rec;
      double test = 0.0;
    };
    std::vector<TableRow> table;
    for (const auto& rec : records) {
      if (rec.metric != target) continue;
      TableRow row{&rec, 0.0};
      for (const auto& [name, value] : rec.test_metrics)
        if (name == target) row.test = value;
      table.push_back(row);
    }
    if (table.empty()) continue;

    double best = table.front().test;
    for (const auto& row : table)
      if (minimize ? row.test < best : row.test > best) best = row.test;

    const std::string stem = "table_" + sanitize_metric(target);
    {
      std::ofstream out = open_output(dir / (stem + ".csv"));
      out << "method,k,alpha,beta,validation,test,best\n";
      for (const auto& row : table) {
        out << row.rec->method << ',' << row.rec->k << ',' << format_double(row.rec->alpha)
            << ',' << format_double(row.rec->beta) << ','
            << format_double(row.rec->validation_value) << ',' << format_double(row.test)
            << ',' << (row.test == best ? 1 : 0) << '\n';
      }
    }
    {
      std::vector<std::array<std::string, 6>> cells;
      cells.push_back({"method", "k", "alpha", "beta", "validation", target});
      for (const auto& row : table)
        cells.push_back({row.rec->method, std::to_string(row.rec->k),
                         format_short(row.rec->alpha), format_short(row.rec->beta),
                         format_short(row.rec->validation_value), format_short(row.test)});
      std::array<std::size_t, 6> widths{};
      for (const auto& row : cells)
        for (std::size_t c = 0; c < row.size(); ++c)
          widths[c] = std::max(widths[c], row[c].size());

      std::ofstream out = open_output(dir / (stem + ".txt"));
      for (std::size_t r = 0; r < cells.size(); ++r) {
        for (std::size_t c = 0; c < cells[r].size(); ++c) {
          if (c > 0) out << "  ";
          out << cells[r][c];
          for (std::size_t pad = cells[r][c].size(); pad < widths[c]; ++pad) out << ' ';
        }
        if (r > 0 && table[r - 1].test == best) out << "  *";
        out << '\n';
      }
    }
  }
}

void save_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out = open_output(path);
  out << "kind,method,value,beta,metric,metric_value,k,alpha,metric_beta\n";
  for (const auto& row : rows)
    for (const auto& cell : row.cells)
      out << row.kind << ',' << row.method << ',' << format_double(row.sweep_value) << ','
          << format_double(row.beta) << ',' << cell.metric << ','
          << format_double(cell.value) << ',' << cell.k << ',' << format_double(cell.alpha)
          << ',' << format_double(cell.beta) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open sweep spec '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad JSON in '" + path.string() + "': " + e.what());
  }
  if (!doc.is_object())
    throw std::runtime_error("sweep spec '" + path.string() + "' must be a JSON object");

  static const std::set<std::string> known = {
      "methods",     "k_grid",        "alpha_grid",           "beta_grid",
      "metrics",     "train_dir",     "validation_dir",       "test_dir",
      "seed",        "n_users",       "n_items",              "epsilon",
      "b",           "target_recs_per_user",                  "a",
      "n_train",     "n_validation",  "n_test",               "unevenness_grid",
      "log_size_grid"};
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key))
      throw std::runtime_error("unknown sweep spec key '" + key + "' in '" + path.string() +
                               "'");

  SweepSpec spec;
  try {
    if (doc.contains("methods")) {
      spec.methods.clear();
      for (const auto& name : doc.at("methods"))
        spec.methods.push_back(parse_method(name.get<std::string>()));
    }
    if (doc.contains("k_grid")) spec.k_grid = doc.at("k_grid").get<std::vector<std::size_t>>();
    if (doc.contains("alpha_grid"))
      spec.alpha_grid = doc.at("alpha_grid").get<std::vector<double>>();
    if (doc.contains("beta_grid"))
      spec.beta_grid = doc.at("beta_grid").get<std::vector<double>>();
    if (doc.contains("metrics"))
      spec.metrics = doc.at("metrics").get<std::vector<std::string>>();
    if (doc.contains("train_dir")) spec.train_dir = doc.at("train_dir").get<std::string>();
    if (doc.contains("validation_dir"))
      spec.validation_dir = doc.at("validation_dir").get<std::string>();
    if (doc.contains("test_dir")) spec.test_dir = doc.at("test_dir").get<std::string>();
    if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("n_users")) spec.n_users = doc.at("n_users").get<std::size_t>();
    if (doc.contains("n_items")) spec.n_items = doc.at("n_items").get<std::size_t>();
    if (doc.contains("epsilon")) spec.gen.epsilon = doc.at("epsilon").get<double>();
    if (doc.contains("b")) spec.gen.b = doc.at("b").get<double>();
    if (doc.contains("target_recs_per_user"))
      spec.gen.target_recs_per_user = doc.at("target_recs_per_user").get<double>();
    if (doc.contains("a") && !doc.at("a").is_null()) spec.gen.a = doc.at("a").get<double>();
    if (doc.contains("n_train")) spec.gen.n_train = doc.at("n_train").get<std::size_t>();
    if (doc.contains("n_validation"))
      spec.gen.n_validation = doc.at("n_validation").get<std::size_t>();
    if (doc.contains("n_test")) spec.gen.n_test = doc.at("n_test").get<std::size_t>();
    if (doc.contains("unevenness_grid"))
      spec.unevenness_grid = doc.at("unevenness_grid").get<std::vector<double>>();
    if (doc.contains("log_size_grid"))
      spec.log_size_grid = doc.at("log_size_grid").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad value in sweep spec '" + path.string() + "': " + e.what());
  }
  spec.gen.seed = spec.seed;
  return spec;
}

}  // namespace cnrank
