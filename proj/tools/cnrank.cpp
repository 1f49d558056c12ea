// Command-line driver: dataset generation, ranking, evaluation, sweeps, and
// the matching estimator. Every flag has a config-file equivalent (JSON,
// keys are the flag names with dashes as underscores); flags override file
// values. The sweep subcommand's --config is the sweep spec itself. Errors
// are emitted as one JSON object on stderr with exit code 1.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "cnrank/baselines.hpp"
#include "cnrank/causal_neighbors.hpp"
#include "cnrank/datagen.hpp"
#include "cnrank/dataset.hpp"
#include "cnrank/harness.hpp"
#include "cnrank/io.hpp"
#include "cnrank/log_io.hpp"
#include "cnrank/matching.hpp"
#include "cnrank/metrics.hpp"
#include "cnrank/ranking.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cnrank;

namespace {

constexpr const char* kUsage =
    "usage: cnrank <generate|rank|evaluate|sweep|match> [options]\n"
    "       cnrank <subcommand> --help for the option list\n";

std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.starts_with("--config=")) return arg.substr(9);
  }
  return {};
}

json load_config(const std::string& path, const std::set<std::string>& known) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("bad JSON in config '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("config '" + path + "' must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key))
      throw std::runtime_error("unknown config key '" + key + "' in '" + path + "'");
  return doc;
}

void emit(const json& result) { std::cout << result.dump(2) << '\n'; }

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::vector<std::size_t> cutoffs_from_metrics(const std::vector<std::string>& metrics) {
  std::vector<std::size_t> cutoffs;
  for (const std::string& name : metrics) {
    if (name == "cdcg" || name == "car") continue;
    if (!name.starts_with("cp@"))
      throw std::invalid_argument("unknown metric '" + name +
                                  "' (expected cp@N, cdcg, or car)");
    const std::string digits = name.substr(3);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad cutoff in metric '" + name + "'");
    const std::size_t n = std::stoull(digits);
    if (n == 0) throw std::invalid_argument("metric cutoff must be positive: " + name);
    if (std::find(cutoffs.begin(), cutoffs.end(), n) == cutoffs.end()) cutoffs.push_back(n);
  }
  return cutoffs;
}

// --------------------------------------------------------------------------

int run_generate(const json& cfg, CLI::App& sub, int argc, char** argv) {
  std::string out_dir, rating_priors, exposure_priors;
  std::uint64_t seed = 0;
  std::size_t n_users = 500, n_items = 300;
  GenParams params;
  double a_flag = 0.0;

  if (cfg.contains("out")) out_dir = cfg.at("out").get<std::string>();
  if (cfg.contains("seed")) seed = cfg.at("seed").get<std::uint64_t>();
  if (cfg.contains("n_users")) n_users = cfg.at("n_users").get<std::size_t>();
  if (cfg.contains("n_items")) n_items = cfg.at("n_items").get<std::size_t>();
  if (cfg.contains("epsilon")) params.epsilon = cfg.at("epsilon").get<double>();
  if (cfg.contains("b")) params.b = cfg.at("b").get<double>();
  if (cfg.contains("target_recs_per_user"))
    params.target_recs_per_user = cfg.at("target_recs_per_user").get<double>();
  if (cfg.contains("a") && !cfg.at("a").is_null()) params.a = cfg.at("a").get<double>();
  if (cfg.contains("n_train")) params.n_train = cfg.at("n_train").get<std::size_t>();
  if (cfg.contains("n_validation"))
    params.n_validation = cfg.at("n_validation").get<std::size_t>();
  if (cfg.contains("n_test")) params.n_test = cfg.at("n_test").get<std::size_t>();
  if (cfg.contains("rating_priors"))
    rating_priors = cfg.at("rating_priors").get<std::string>();
  if (cfg.contains("exposure_priors"))
    exposure_priors = cfg.at("exposure_priors").get<std::string>();

  sub.add_option("--out", out_dir, "Output directory for the split datasets");
  sub.add_option("--seed", seed, "Generation seed");
  sub.add_option("--n-users", n_users, "Users in the synthetic prior matrices");
  sub.add_option("--n-items", n_items, "Items in the synthetic prior matrices");
  sub.add_option("--epsilon", params.epsilon, "Rating shift before the logistic squash");
  auto* a_opt = sub.add_option("--a", a_flag, "Propensity scale (calibrated when absent)");
  sub.add_option("--b", params.b, "Propensity unevenness exponent");
  sub.add_option("--target-recs", params.target_recs_per_user,
                 "Calibration target: expected recommendations per user");
  sub.add_option("--n-train", params.n_train, "Training split replicates");
  sub.add_option("--n-validation", params.n_validation, "Validation split replicates");
  sub.add_option("--n-test", params.n_test, "Test split replicates");
  sub.add_option("--rating-priors", rating_priors,
                 "Dense triplet file of predicted ratings (default: synthetic priors)");
  sub.add_option("--exposure-priors", exposure_priors,
                 "Dense triplet file of exposure probabilities");

  sub.parse(argc, argv);
  if (a_opt->count() > 0) params.a = a_flag;
  if (out_dir.empty()) throw std::invalid_argument("missing --out");
  if (rating_priors.empty() != exposure_priors.empty())
    throw std::invalid_argument("--rating-priors and --exposure-priors go together");

  params.seed = seed;
  DenseMatrix r_hat, o_hat;
  if (!rating_priors.empty()) {
    r_hat = read_dense_matrix(rating_priors);
    o_hat = read_dense_matrix(exposure_priors);
  } else {
    std::tie(r_hat, o_hat) = synth_priors(n_users, n_items, seed);
  }

  const DatasetBundle bundle = generate_splits(r_hat, o_hat, params);
  const auto save_all = [&](const std::vector<GeneratedDataset>& splits,
                            const std::string& label) {
    json paths = json::array();
    for (std::size_t i = 0; i < splits.size(); ++i) {
      const fs::path dir = splits.size() == 1
                               ? fs::path(out_dir) / label
                               : fs::path(out_dir) / (label + "-" + std::to_string(i));
      save_dataset(splits[i], dir);
      paths.push_back(dir.string());
    }
    return paths;
  };

  json result;
  result["out"] = out_dir;
  result["seed"] = seed;
  result["a"] = bundle.train.at(0).params.at("a");
  result["splits"]["train"] = save_all(bundle.train, "train");
  result["splits"]["validation"] = save_all(bundle.validation, "validation");
  result["splits"]["test"] = save_all(bundle.test, "test");
  emit(result);
  return 0;
}

// --------------------------------------------------------------------------

int run_rank(const json& cfg, CLI::App& sub, int argc, char** argv) {
  std::string dataset_dir, log_path, log_format = "csv", method_name, out_path;
  std::size_t k = 100;
  double alpha = 1.0;
  double beta_t = 0.0, beta_c = 0.0;
  double beta_flag = 0.0, beta_t_flag = 0.0, beta_c_flag = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;

  if (cfg.contains("dataset_dir")) dataset_dir = cfg.at("dataset_dir").get<std::string>();
  if (cfg.contains("log")) log_path = cfg.at("log").get<std::string>();
  if (cfg.contains("log_format")) log_format = cfg.at("log_format").get<std::string>();
  if (cfg.contains("method")) method_name = cfg.at("method").get<std::string>();
  if (cfg.contains("out")) out_path = cfg.at("out").get<std::string>();
  if (cfg.contains("k")) k = cfg.at("k").get<std::size_t>();
  if (cfg.contains("alpha")) alpha = cfg.at("alpha").get<double>();
  if (cfg.contains("beta")) beta_t = beta_c = cfg.at("beta").get<double>();
  if (cfg.contains("beta_t")) beta_t = cfg.at("beta_t").get<double>();
  if (cfg.contains("beta_c")) beta_c = cfg.at("beta_c").get<double>();
  if (cfg.contains("seed")) {
    seed = cfg.at("seed").get<std::uint64_t>();
    seed_set = true;
  }

  sub.add_option("--dataset-dir", dataset_dir, "Split directory holding y and z");
  sub.add_option("--log", log_path, "Interaction log (user,item,y,z) instead of a dataset");
  sub.add_option("--log-format", log_format, "csv or tsv")
      ->check(CLI::IsMember({"csv", "tsv"}));
  sub.add_option("--method", method_name, "Ranker name (cubn-o, ..., ubn, ibn, random, pop)");
  sub.add_option("--out", out_path, "Ranked-list CSV to write");
  sub.add_option("--k", k, "Neighborhood size");
  sub.add_option("--alpha", alpha, "Similarity scaling exponent");
  auto* beta_opt = sub.add_option("--beta", beta_flag, "Tied shrinkage for both outcomes");
  auto* beta_t_opt = sub.add_option("--beta-t", beta_t_flag, "Treated-side shrinkage");
  auto* beta_c_opt = sub.add_option("--beta-c", beta_c_flag, "Control-side shrinkage");
  auto* seed_opt = sub.add_option("--seed", seed, "Seed for the random baseline");

  sub.parse(argc, argv);
  if (beta_opt->count() > 0) beta_t = beta_c = beta_flag;
  if (beta_t_opt->count() > 0) beta_t = beta_t_flag;
  if (beta_c_opt->count() > 0) beta_c = beta_c_flag;
  seed_set = seed_set || seed_opt->count() > 0;

  if (method_name.empty()) throw std::invalid_argument("missing --method");
  if (out_path.empty()) throw std::invalid_argument("missing --out");
  if (dataset_dir.empty() == log_path.empty())
    throw std::invalid_argument("exactly one of --dataset-dir and --log is required");

  SparseBinaryMatrix y, z;
  if (!dataset_dir.empty()) {
    GeneratedDataset ds = load_dataset(dataset_dir);
    y = std::move(ds.y);
    z = std::move(ds.z);
  } else {
    const InteractionLog log =
        load_log(log_path, log_format == "tsv" ? LogFormat::tsv : LogFormat::csv);
    std::tie(y, z) = to_matrices(log);
  }

  const HarnessMethod method = parse_method(method_name);
  const MethodDescription traits = describe_method(method);
  RankedLists lists;
  switch (method) {
    case HarnessMethod::random:
      if (!seed_set) throw std::invalid_argument("the random baseline requires --seed");
      lists = rank_random(y.n_rows(), y.n_cols(), seed);
      break;
    case HarnessMethod::pop:
      lists = rank_pop(y);
      break;
    case HarnessMethod::ubn:
    case HarnessMethod::ibn: {
      SimilarityConfig sim;
      sim.k = k;
      sim.alpha = alpha;
      sim.orientation = traits.orientation;
      lists = rank_ubn_ibn(y, sim);
      break;
    }
    default: {
      RankerConfig rc;
      rc.sim.k = k;
      rc.sim.alpha = alpha;
      rc.sim.orientation = traits.orientation;
      rc.sim.source = traits.source;
      rc.mix_own = traits.mix_own;
      if (traits.mix_own) {
        rc.beta_t = beta_t;
        rc.beta_c = beta_c;
      }
      lists = run_ranker(y, z, rc);
      break;
    }
  }

  save_rankings(out_path, lists);
  json result;
  result["out"] = out_path;
  result["method"] = method_name;
  result["n_users"] = lists.n_users();
  result["n_items"] = lists.n_items;
  emit(result);
  return 0;
}

// --------------------------------------------------------------------------

int run_evaluate(const json& cfg, CLI::App& sub, int argc, char** argv) {
  std::string dataset_dir, rankings_path, scores_path, out_path;
  std::vector<std::string> metrics{"cp@10", "cdcg", "car"};
  bool per_user = false, as_json = false;

  if (cfg.contains("dataset_dir")) dataset_dir = cfg.at("dataset_dir").get<std::string>();
  if (cfg.contains("rankings")) rankings_path = cfg.at("rankings").get<std::string>();
  if (cfg.contains("scores")) scores_path = cfg.at("scores").get<std::string>();
  if (cfg.contains("out")) out_path = cfg.at("out").get<std::string>();
  if (cfg.contains("metric")) metrics = cfg.at("metric").get<std::vector<std::string>>();
  if (cfg.contains("per_user")) per_user = cfg.at("per_user").get<bool>();
  if (cfg.contains("json")) as_json = cfg.at("json").get<bool>();

  sub.add_option("--dataset-dir", dataset_dir, "Split directory holding the ground truth");
  sub.add_option("--rankings", rankings_path, "Ranked-list CSV to score");
  sub.add_option("--scores", scores_path,
                 "(user,item,score) CSV ranked with the standard tie-break");
  sub.add_option("--out", out_path, "Report file (.json selects the JSON writer)");
  sub.add_option("--metric", metrics, "Metrics to report (cp@N, cdcg, car)");
  sub.add_flag("--per-user", per_user, "Also write the per-user breakdown");
  sub.add_flag("--json", as_json, "Write the report as JSON regardless of extension");

  sub.parse(argc, argv);
  if (dataset_dir.empty()) throw std::invalid_argument("missing --dataset-dir");
  if (out_path.empty()) throw std::invalid_argument("missing --out");
  if (rankings_path.empty() == scores_path.empty())
    throw std::invalid_argument("exactly one of --rankings and --scores is required");

  const GeneratedDataset ds = load_dataset(dataset_dir);
  RankedLists lists;
  if (!rankings_path.empty()) {
    lists = load_rankings(rankings_path);
  } else {
    lists = rank_score_matrix(load_score_table(scores_path, ds.n_users(), ds.n_items()));
  }

  const std::vector<std::size_t> cutoffs = cutoffs_from_metrics(metrics);
  const MetricReport report = evaluate(lists, ds, cutoffs, per_user);

  const bool json_out = as_json || fs::path(out_path).extension() == ".json";
  if (json_out)
    save_report_json(out_path, report);
  else
    save_report_csv(out_path, report);
  if (per_user && !json_out) {
    fs::path per_user_path(out_path);
    per_user_path.replace_extension();
    per_user_path += "_per_user.csv";
    save_per_user_csv(per_user_path, report);
  }

  json result;
  result["out"] = out_path;
  for (std::size_t c = 0; c < report.cutoffs.size(); ++c)
    result["cp@" + std::to_string(report.cutoffs[c])] = report.cp_at[c];
  result["cdcg"] = report.cdcg;
  result["car"] = report.car;
  emit(result);
  return 0;
}

// --------------------------------------------------------------------------

int run_sweep(CLI::App& sub, int argc, char** argv) {
  std::string config_path, kind_name = "full", out_dir, dataset_root;
  std::uint64_t seed = 0;
  std::vector<std::string> metrics, methods;

  sub.add_option("--config", config_path, "Sweep spec JSON");
  sub.add_option("--kind", kind_name, "full, neighbors, alpha_beta, unevenness, or log_size")
      ->check(CLI::IsMember({"full", "neighbors", "alpha_beta", "unevenness", "log_size"}));
  sub.add_option("--out", out_dir, "Output directory");
  sub.add_option("--dataset-dir", dataset_root,
                 "Root holding train/, validation/, and test/ splits");
  auto* seed_opt = sub.add_option("--seed", seed, "Base seed override");
  sub.add_option("--metric", metrics, "Metric target overrides");
  sub.add_option("--method", methods, "Method overrides");

  sub.parse(argc, argv);
  if (out_dir.empty()) throw std::invalid_argument("missing --out");

  SweepSpec spec;
  if (!config_path.empty()) spec = load_sweep_spec(config_path);
  if (seed_opt->count() > 0) {
    spec.seed = seed;
    spec.gen.seed = seed;
  }
  if (!metrics.empty()) spec.metrics = metrics;
  if (!methods.empty()) {
    spec.methods.clear();
    for (const std::string& name : methods) spec.methods.push_back(parse_method(name));
  }
  if (!dataset_root.empty()) {
    spec.train_dir = fs::path(dataset_root) / "train";
    spec.validation_dir = fs::path(dataset_root) / "validation";
    spec.test_dir = fs::path(dataset_root) / "test";
  }

  json result;
  result["out"] = out_dir;
  result["kind"] = kind_name;
  if (kind_name == "full") {
    const std::vector<RunRecord> records = run_experiment(spec);
    emit_tables(records, out_dir);
    result["records"] = records.size();
  } else {
    const SweepKind kind = parse_sweep_kind(kind_name);
    const std::vector<SweepRow> rows = sensitivity_sweep(kind, spec);
    fs::create_directories(out_dir);
    const fs::path csv = fs::path(out_dir) / ("sweep_" + kind_name + ".csv");
    save_sweep_csv(csv, rows);
    result["rows"] = rows.size();
    result["csv"] = csv.string();
  }
  emit(result);
  return 0;
}

// --------------------------------------------------------------------------

int run_match(const json& cfg, CLI::App& sub, int argc, char** argv) {
  std::string panel_path, out_path, summary_path;
  std::size_t m = 1;

  if (cfg.contains("panel")) panel_path = cfg.at("panel").get<std::string>();
  if (cfg.contains("out")) out_path = cfg.at("out").get<std::string>();
  if (cfg.contains("summary_out")) summary_path = cfg.at("summary_out").get<std::string>();
  if (cfg.contains("m")) m = cfg.at("m").get<std::size_t>();

  sub.add_option("--panel", panel_path, "Subject panel CSV (id,z,y,covariates...)");
  sub.add_option("--out", out_path, "Per-subject effect CSV to write");
  sub.add_option("--summary-out", summary_path, "Optional ATE/ATT summary CSV");
  sub.add_option("--m", m, "Matches per subject");

  sub.parse(argc, argv);
  if (panel_path.empty()) throw std::invalid_argument("missing --panel");
  if (out_path.empty()) throw std::invalid_argument("missing --out");

  const SubjectPanel panel = load_panel_csv(panel_path);
  const MatchedSets matches = match_subjects(panel, m);
  const CounterfactualEstimates estimates = estimate_counterfactuals(panel, matches);
  const std::vector<double> effects = per_subject_effect(panel, estimates);
  const double ate = aggregate(effects, AggregateMode::ate, panel.z);
  const bool any_treated =
      std::find(panel.z.begin(), panel.z.end(), std::uint8_t{1}) != panel.z.end();
  std::optional<double> att;
  if (any_treated) att = aggregate(effects, AggregateMode::att, panel.z);

  {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
    out << "id,z,y,y_t_hat,y_c_hat,effect\n";
    for (std::size_t s = 0; s < panel.n_subjects(); ++s)
      out << panel.ids[s] << ',' << int(panel.z[s]) << ',' << int(panel.y[s]) << ','
          << format_double(estimates.y_t_hat[s]) << ','
          << format_double(estimates.y_c_hat[s]) << ',' << format_double(effects[s]) << '\n';
  }
  if (!summary_path.empty()) {
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + summary_path + "' for writing");
    out << "statistic,value\n";
    out << "ate," << format_double(ate) << '\n';
    if (att) out << "att," << format_double(*att) << '\n';
  }

  json result;
  result["out"] = out_path;
  result["n_subjects"] = panel.n_subjects();
  result["ate"] = ate;
  if (att)
    result["att"] = *att;
  else
    result["att"] = nullptr;
  emit(result);
  return 0;
}

int run(int argc, char** argv) {
  if (argc < 2) {
    std::cout << kUsage;
    return 1;
  }
  const std::string command = argv[1];
  if (command == "--help" || command == "-h" || command == "help") {
    std::cout << kUsage;
    return 0;
  }

  CLI::App sub{"cnrank " + command};
  std::string config_opt;
  if (command != "sweep")
    sub.add_option("--config", config_opt, "JSON config file (flags override its values)");
  const std::string config_path = find_config_path(argc, argv);

  // Subcommand argv: drop the program name so the subcommand name takes its
  // place, which is what CLI::App::parse expects.
  const int sub_argc = argc - 1;
  char** sub_argv = argv + 1;

  try {
    if (command == "generate") {
      static const std::set<std::string> keys{
          "out",     "seed",         "n_users", "n_items",       "epsilon",
          "a",       "b",            "target_recs_per_user",     "n_train",
          "n_validation",            "n_test",  "rating_priors", "exposure_priors"};
      const json cfg = config_path.empty() ? json::object() : load_config(config_path, keys);
      return run_generate(cfg, sub, sub_argc, sub_argv);
    }
    if (command == "rank") {
      static const std::set<std::string> keys{"dataset_dir", "log",    "log_format", "method",
                                              "out",         "k",      "alpha",      "beta",
                                              "beta_t",      "beta_c", "seed"};
      const json cfg = config_path.empty() ? json::object() : load_config(config_path, keys);
      return run_rank(cfg, sub, sub_argc, sub_argv);
    }
    if (command == "evaluate") {
      static const std::set<std::string> keys{"dataset_dir", "rankings", "scores", "out",
                                              "metric",      "per_user", "json"};
      const json cfg = config_path.empty() ? json::object() : load_config(config_path, keys);
      return run_evaluate(cfg, sub, sub_argc, sub_argv);
    }
    if (command == "sweep") return run_sweep(sub, sub_argc, sub_argv);
    if (command == "match") {
      static const std::set<std::string> keys{"panel", "out", "summary_out", "m"};
      const json cfg = config_path.empty() ? json::object() : load_config(config_path, keys);
      return run_match(cfg, sub, sub_argc, sub_argv);
    }
  } catch (const CLI::CallForHelp&) {
    std::cout << sub.help();
    return 0;
  }
  throw std::invalid_argument("unknown subcommand '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError& e) {
    json error;
    error["error"] = e.what();
    std::cerr << error.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    json error;
    error["error"] = e.what();
    std::cerr << error.dump() << '\n';
    return 1;
  }
}
