#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "cnrank/baselines.hpp"
#include "cnrank/causal_neighbors.hpp"
#include "cnrank/datagen.hpp"
#include "cnrank/harness.hpp"
#include "cnrank/metrics.hpp"

#include "temp_dir.hpp"

using namespace cnrank;

namespace {

ExperimentData tiny_data(std::uint64_t seed) {
  const auto [r_hat, o_hat] = synth_priors(12, 8, seed);
  GenParams params;
  params.target_recs_per_user = 3.0;
  params.seed = seed;
  DatasetBundle bundle = generate_splits(r_hat, o_hat, params);
  return {std::move(bundle.train[0]), std::move(bundle.validation[0]),
          std::move(bundle.test[0])};
}

SweepSpec tiny_spec(std::uint64_t seed) {
  SweepSpec spec;
  spec.methods = {HarnessMethod::cubn_o, HarnessMethod::ubn, HarnessMethod::pop};
  spec.k_grid = {2, 4};
  spec.alpha_grid = {0.5, 1.0};
  spec.beta_grid = {0.0, 1.0};
  spec.metrics = {"cp@2", "car"};
  spec.seed = seed;
  return spec;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("method names round-trip and describe their configuration") {
  for (const HarnessMethod method :
       {HarnessMethod::cubn_o, HarnessMethod::cubn_t, HarnessMethod::cibn_o,
        HarnessMethod::cibn_t, HarnessMethod::cubn_o_wom, HarnessMethod::cubn_t_wom,
        HarnessMethod::cibn_o_wom, HarnessMethod::cibn_t_wom, HarnessMethod::ubn,
        HarnessMethod::ibn, HarnessMethod::random, HarnessMethod::pop}) {
    CHECK(parse_method(method_name(method)) == method);
  }
  CHECK_THROWS_AS(parse_method("cubn"), std::invalid_argument);

  const MethodDescription cubn_t = describe_method(HarnessMethod::cubn_t);
  CHECK(cubn_t.causal);
  CHECK(cubn_t.neighbor);
  CHECK(cubn_t.mix_own);
  CHECK(cubn_t.source == SimilaritySource::treatments);
  CHECK(cubn_t.orientation == Orientation::user);

  const MethodDescription cibn_wom = describe_method(HarnessMethod::cibn_o_wom);
  CHECK(cibn_wom.causal);
  CHECK_FALSE(cibn_wom.mix_own);
  CHECK(cibn_wom.orientation == Orientation::item);

  const MethodDescription pop = describe_method(HarnessMethod::pop);
  CHECK_FALSE(pop.neighbor);
  CHECK_FALSE(pop.causal);

  const MethodDescription ibn = describe_method(HarnessMethod::ibn);
  CHECK(ibn.neighbor);
  CHECK_FALSE(ibn.causal);
  CHECK(ibn.orientation == Orientation::item);
}

TEST_CASE("sweep kind names round-trip") {
  for (const SweepKind kind : {SweepKind::neighbors, SweepKind::alpha_beta,
                               SweepKind::unevenness, SweepKind::log_size}) {
    CHECK(parse_sweep_kind(sweep_kind_name(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_sweep_kind("widths"), std::invalid_argument);
}

TEST_CASE("run_experiment returns one record per method and metric") {
  const ExperimentData data = tiny_data(5);
  const SweepSpec spec = tiny_spec(5);
  const std::vector<RunRecord> records = run_experiment(spec, data);
  REQUIRE(records.size() == 6);

  std::set<std::pair<std::string, std::string>> seen;
  for (const RunRecord& rec : records) {
    seen.insert({rec.method, rec.metric});
    REQUIRE(rec.test_metrics.size() == 2);
    CHECK(rec.test_metrics[0].first == "cp@2");
    CHECK(rec.test_metrics[1].first == "car");
    CHECK(rec.seed == 5);
  }
  CHECK(seen.size() == 6);
}

TEST_CASE("single-point methods report the metrics they were evaluated on") {
  const ExperimentData data = tiny_data(6);
  SweepSpec spec = tiny_spec(6);
  spec.methods = {HarnessMethod::pop};
  const std::vector<RunRecord> records = run_experiment(spec, data);
  REQUIRE(records.size() == 2);

  const RankedLists lists = rank_pop(data.train.y);
  const std::size_t cutoffs[] = {2};
  const MetricReport validation = evaluate_against(lists, data.validation.tau, cutoffs);
  const MetricReport test = evaluate_against(lists, data.test.tau, cutoffs);

  CHECK(records[0].metric == "cp@2");
  CHECK(records[0].validation_value == validation.cp_at[0]);
  CHECK(records[0].test_metrics[0].second == test.cp_at[0]);
  CHECK(records[0].test_metrics[1].second == test.car);
  CHECK(records[1].metric == "car");
  CHECK(records[1].validation_value == validation.car);
  CHECK(records[0].k == 0);
  CHECK(records[0].alpha == 0.0);
  CHECK(records[0].beta == 0.0);
}

TEST_CASE("selection optimizes the right direction per metric") {
  const ExperimentData data = tiny_data(7);
  const SweepSpec spec = tiny_spec(7);
  const std::vector<RunRecord> records = run_experiment(spec, data);

  // Rebuild the cubn-o grid by brute force and check the chosen validation
  // values are the extremes.
  for (const RunRecord& rec : records) {
    if (rec.method != "cubn-o") continue;
    for (const std::size_t k : spec.k_grid) {
      for (const double alpha : spec.alpha_grid) {
        for (const double beta : spec.beta_grid) {
          RankerConfig rc;
          rc.sim.k = k;
          rc.sim.alpha = alpha;
          rc.beta_t = beta;
          rc.beta_c = beta;
          const RankedLists lists = run_ranker(data.train.y, data.train.z, rc);
          const std::size_t cutoffs[] = {2};
          const MetricReport report =
              evaluate_against(lists, data.validation.tau, cutoffs);
          if (rec.metric == "cp@2") {
            CHECK(rec.validation_value >= report.cp_at[0]);
          } else {
            CHECK(rec.validation_value <= report.car);
          }
        }
      }
    }
  }
}

TEST_CASE("repeated runs produce identical records") {
  const ExperimentData data = tiny_data(8);
  const SweepSpec spec = tiny_spec(8);
  const std::vector<RunRecord> first = run_experiment(spec, data);
  const std::vector<RunRecord> second = run_experiment(spec, data);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].method == second[i].method);
    CHECK(first[i].metric == second[i].metric);
    CHECK(first[i].k == second[i].k);
    CHECK(first[i].alpha == second[i].alpha);
    CHECK(first[i].beta == second[i].beta);
    CHECK(first[i].validation_value == second[i].validation_value);
    CHECK(first[i].test_metrics == second[i].test_metrics);
  }
}

TEST_CASE("emit_tables writes records and per-metric tables with best flags") {
  TempDir tmp;
  const ExperimentData data = tiny_data(9);
  const SweepSpec spec = tiny_spec(9);
  const std::vector<RunRecord> records = run_experiment(spec, data);
  emit_tables(records, tmp.file("out"));

  const std::string records_csv = read_file(tmp.file("out") / "records.csv");
  CHECK(records_csv.find("method,metric,k,alpha,beta,validation,test_cp@2,test_car,seed") == 0);
  std::size_t lines = 0;
  for (const char c : records_csv)
    if (c == '\n') ++lines;
  CHECK(lines == records.size() + 1);

  for (const char* name : {"table_cp_at_2.csv", "table_cp_at_2.txt", "table_car.csv",
                           "table_car.txt"}) {
    CHECK(std::filesystem::exists(tmp.file("out") / name));
  }

  // In the car table the flagged row carries the smallest test value.
  const std::string car_csv = read_file(tmp.file("out") / "table_car.csv");
  std::istringstream in(car_csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "method,k,alpha,beta,validation,test,best");
  double best_value = 0.0;
  std::vector<double> all_values;
  while (std::getline(in, line)) {
    const std::size_t last_comma = line.rfind(',');
    const bool flagged = line.substr(last_comma + 1) == "1";
    const std::size_t prev_comma = line.rfind(',', last_comma - 1);
    const double test_value =
        std::stod(line.substr(prev_comma + 1, last_comma - prev_comma - 1));
    if (flagged) best_value = test_value;
    all_values.push_back(test_value);
  }
  REQUIRE(all_values.size() == 3);
  for (const double v : all_values) CHECK(best_value <= v);

  CHECK_THROWS_AS(emit_tables({}, tmp.file("empty")), std::invalid_argument);
}

TEST_CASE("the neighbors sweep drops oversized k and non-neighbor methods") {
  const ExperimentData data = tiny_data(10);
  SweepSpec spec = tiny_spec(10);
  spec.k_grid = {2, 4, 50};  // 50 exceeds the 11 available users
  const std::vector<SweepRow> rows =
      sensitivity_sweep(SweepKind::neighbors, spec, data);
  // cubn-o and ubn each get rows for k = 2 and k = 4; pop is skipped.
  REQUIRE(rows.size() == 4);
  for (const SweepRow& row : rows) {
    CHECK(row.kind == "neighbors");
    CHECK((row.method == "cubn-o" || row.method == "ubn"));
    CHECK((row.sweep_value == 2.0 || row.sweep_value == 4.0));
    REQUIRE(row.cells.size() == 2);
    CHECK(row.cells[0].metric == "cp@2");
    CHECK(row.cells[0].k == static_cast<std::size_t>(row.sweep_value));
  }
}

TEST_CASE("the alpha_beta sweep covers the full grid for mixed causal methods") {
  const ExperimentData data = tiny_data(11);
  const SweepSpec spec = tiny_spec(11);
  const std::vector<SweepRow> rows =
      sensitivity_sweep(SweepKind::alpha_beta, spec, data);
  // Only cubn-o qualifies: 2 alphas x 2 betas.
  REQUIRE(rows.size() == 4);
  std::set<std::pair<double, double>> combos;
  for (const SweepRow& row : rows) {
    CHECK(row.method == "cubn-o");
    combos.insert({row.sweep_value, row.beta});
    for (const auto& cell : row.cells) CHECK(cell.k == 11);
  }
  CHECK(combos.size() == 4);
}

TEST_CASE("regenerating sweeps refuse preloaded data") {
  const ExperimentData data = tiny_data(12);
  const SweepSpec spec = tiny_spec(12);
  CHECK_THROWS_AS(sensitivity_sweep(SweepKind::unevenness, spec, data),
                  std::invalid_argument);
  CHECK_THROWS_AS(sensitivity_sweep(SweepKind::log_size, spec, data),
                  std::invalid_argument);
}

TEST_CASE("the unevenness sweep regenerates a dataset per grid point") {
  SweepSpec spec = tiny_spec(13);
  spec.methods = {HarnessMethod::pop};
  spec.metrics = {"cp@2"};
  spec.n_users = 10;
  spec.n_items = 6;
  spec.gen.target_recs_per_user = 2.0;
  spec.unevenness_grid = {0.5, 2.0};

  const std::vector<SweepRow> rows = sensitivity_sweep(SweepKind::unevenness, spec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].sweep_value == 0.5);
  CHECK(rows[1].sweep_value == 2.0);
  for (const SweepRow& row : rows) {
    CHECK(row.kind == "unevenness");
    REQUIRE(row.cells.size() == 1);
    CHECK(row.cells[0].metric == "cp@2");
  }

  const std::vector<SweepRow> again = sensitivity_sweep(SweepKind::unevenness, spec);
  REQUIRE(again.size() == 2);
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(rows[i].cells[0].value == again[i].cells[0].value);
}

TEST_CASE("sweep rows serialize one line per cell") {
  TempDir tmp;
  SweepRow row;
  row.kind = "neighbors";
  row.method = "ubn";
  row.sweep_value = 10.0;
  row.cells.push_back({"cp@2", 0.125, 10, 1.0, 0.0});
  row.cells.push_back({"car", -0.5, 10, 0.5, 0.0});
  save_sweep_csv(tmp.file("sweep.csv"), {row});
  const std::string text = read_file(tmp.file("sweep.csv"));
  CHECK(text ==
        "kind,method,value,beta,metric,metric_value,k,alpha,metric_beta\n"
        "neighbors,ubn,10,0,cp@2,0.125,10,1,0\n"
        "neighbors,ubn,10,0,car,-0.5,10,0.5,0\n");
}

TEST_CASE("sweep specs load from json and reject unknown keys") {
  TempDir tmp;
  {
    std::ofstream out(tmp.file("spec.json"));
    out << R"({
      "methods": ["cubn-o", "pop"],
      "k_grid": [3, 5],
      "alpha_grid": [1.0],
      "beta_grid": [0.0, 2.0],
      "metrics": ["cp@3"],
      "train_dir": "a/train",
      "validation_dir": "a/validation",
      "test_dir": "a/test",
      "seed": 44,
      "n_users": 100,
      "n_items": 50,
      "b": 1.5,
      "target_recs_per_user": 20.0,
      "unevenness_grid": [0.5]
    })";
  }
  const SweepSpec spec = load_sweep_spec(tmp.file("spec.json"));
  CHECK(spec.methods ==
        std::vector<HarnessMethod>{HarnessMethod::cubn_o, HarnessMethod::pop});
  CHECK(spec.k_grid == std::vector<std::size_t>{3, 5});
  CHECK(spec.beta_grid == std::vector<double>{0.0, 2.0});
  CHECK(spec.metrics == std::vector<std::string>{"cp@3"});
  CHECK(spec.train_dir == std::filesystem::path("a/train"));
  CHECK(spec.seed == 44);
  CHECK(spec.gen.seed == 44);
  CHECK(spec.n_users == 100);
  CHECK(spec.gen.b == 1.5);
  CHECK(spec.gen.target_recs_per_user == 20.0);
  CHECK(spec.unevenness_grid == std::vector<double>{0.5});

  {
    std::ofstream out(tmp.file("bad.json"));
    out << R"({"widths": [1]})";
  }
  CHECK_THROWS(load_sweep_spec(tmp.file("bad.json")));
  CHECK_THROWS(load_sweep_spec(tmp.file("absent.json")));
}

}  // TEST_SUITE
