// Integration tests that drive the installed cnrank binary as a subprocess.
// The binary path arrives via the CNRANK_BIN environment variable so the
// test does not care where the build tree puts it.

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <string>

#include "doctest.h"

#include "temp_dir.hpp"

namespace {

std::string binary_path() {
  const char* env = std::getenv("CNRANK_BIN");
  return env ? env : "";
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const TempDir& tmp, const std::string& args, const std::string& env = {}) {
  static std::atomic<unsigned> counter{0};
  const unsigned id = counter.fetch_add(1);
  const std::filesystem::path out_path = tmp.file("cli-out-" + std::to_string(id));
  const std::filesystem::path err_path = tmp.file("cli-err-" + std::to_string(id));

  std::string command;
  if (!env.empty()) command += env + " ";
  command += "\"" + binary_path() + "\" " + args + " > \"" + out_path.string() + "\" 2> \"" +
             err_path.string() + "\"";

  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

std::string quoted(const std::filesystem::path& path) { return "\"" + path.string() + "\""; }

/// Generates a small three-split dataset under tmp/data and returns its root.
std::filesystem::path generate_data(const TempDir& tmp) {
  const std::filesystem::path root = tmp.file("data");
  const CliResult gen = run_cli(
      tmp, "generate --out " + quoted(root) +
               " --seed 11 --n-users 15 --n-items 8 --target-recs 3 --epsilon 2");
  REQUIRE(gen.exit_code == 0);
  return root;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("binary path is provided") {
  REQUIRE_FALSE(binary_path().empty());
  REQUIRE(std::filesystem::exists(binary_path()));
}

TEST_CASE("usage and help") {
  TempDir tmp;
  const CliResult bare = run_cli(tmp, "");
  CHECK(bare.exit_code == 1);
  CHECK(bare.out.find("usage: cnrank") != std::string::npos);

  const CliResult help = run_cli(tmp, "--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("usage: cnrank") != std::string::npos);

  const CliResult rank_help = run_cli(tmp, "rank --help");
  CHECK(rank_help.exit_code == 0);
  CHECK(rank_help.out.find("--dataset-dir") != std::string::npos);
  CHECK(rank_help.out.find("--beta-t") != std::string::npos);

  const CliResult unknown = run_cli(tmp, "frobnicate");
  CHECK(unknown.exit_code == 1);
  CHECK(unknown.err.find("\"error\"") != std::string::npos);
  CHECK(unknown.err.find("unknown subcommand") != std::string::npos);
}

TEST_CASE("generate, rank, and evaluate chain") {
  TempDir tmp;
  const std::filesystem::path root = tmp.file("data");
  const CliResult gen = run_cli(
      tmp, "generate --out " + quoted(root) +
               " --seed 11 --n-users 15 --n-items 8 --target-recs 3 --epsilon 2");
  REQUIRE(gen.exit_code == 0);
  CHECK(gen.out.find("\"a\":") != std::string::npos);
  for (const char* split : {"train", "validation", "test"}) {
    CHECK(std::filesystem::exists(root / split / "manifest.json"));
    CHECK(std::filesystem::exists(root / split / "tau.txt"));
  }

  const std::filesystem::path ranks = tmp.file("ranks.csv");
  const CliResult rank = run_cli(
      tmp, "rank --dataset-dir " + quoted(root / "train") +
               " --method cubn-o --k 5 --alpha 1 --beta 0.5 --out " + quoted(ranks));
  REQUIRE(rank.exit_code == 0);
  CHECK(rank.out.find("\"n_users\": 15") != std::string::npos);
  CHECK(slurp(ranks).rfind("user,item,rank,tau_hat\n", 0) == 0);

  const std::filesystem::path report = tmp.file("report.csv");
  const CliResult eval = run_cli(
      tmp, "evaluate --dataset-dir " + quoted(root / "test") + " --rankings " +
               quoted(ranks) + " --metric cp@3 --metric car --out " + quoted(report));
  REQUIRE(eval.exit_code == 0);
  CHECK(eval.out.find("\"car\":") != std::string::npos);
  const std::string report_text = slurp(report);
  CHECK(report_text.rfind("metric,value\ncp@3,", 0) == 0);
  CHECK(report_text.find("\ncar,") != std::string::npos);

  const std::filesystem::path report_json = tmp.file("report.json");
  const CliResult eval_json = run_cli(
      tmp, "evaluate --dataset-dir " + quoted(root / "test") + " --rankings " +
               quoted(ranks) + " --metric cp@3 --per-user --out " + quoted(report_json));
  REQUIRE(eval_json.exit_code == 0);
  const std::string json_text = slurp(report_json);
  CHECK(json_text.rfind("{", 0) == 0);
  CHECK(json_text.find("\"cdcg\"") != std::string::npos);
  CHECK(json_text.find("\"per_user\"") != std::string::npos);
}

TEST_CASE("config file values match flags and flags override") {
  TempDir tmp;
  const std::filesystem::path root = generate_data(tmp);

  const std::filesystem::path by_flags = tmp.file("by_flags.csv");
  REQUIRE(run_cli(tmp, "rank --dataset-dir " + quoted(root / "train") +
                           " --method cubn-o --k 5 --alpha 2 --beta 1 --out " +
                           quoted(by_flags))
              .exit_code == 0);

  const std::filesystem::path config = tmp.file("rank.json");
  const std::filesystem::path by_config = tmp.file("by_config.csv");
  write_text(config, std::string("{\n") + "  \"dataset_dir\": \"" +
                         (root / "train").string() + "\",\n" +
                         "  \"method\": \"cubn-o\",\n  \"k\": 5,\n  \"alpha\": 2.0,\n" +
                         "  \"beta\": 1.0,\n  \"out\": \"" + by_config.string() + "\"\n}\n");
  REQUIRE(run_cli(tmp, "rank --config " + quoted(config)).exit_code == 0);
  const std::string flag_bytes = slurp(by_flags);
  REQUIRE_FALSE(flag_bytes.empty());
  CHECK(flag_bytes == slurp(by_config));

  const std::filesystem::path overridden = tmp.file("overridden.csv");
  REQUIRE(run_cli(tmp, "rank --config " + quoted(config) + " --method pop --out " +
                           quoted(overridden))
              .exit_code == 0);
  const std::string pop_bytes = slurp(overridden);
  REQUIRE_FALSE(pop_bytes.empty());
  CHECK(pop_bytes != flag_bytes);

  const std::filesystem::path bad_config = tmp.file("bad.json");
  write_text(bad_config, "{\"widths\": 3}\n");
  const CliResult bad = run_cli(tmp, "rank --config " + quoted(bad_config));
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("unknown config key 'widths'") != std::string::npos);
}

TEST_CASE("worker count does not change ranking bytes") {
  TempDir tmp;
  const std::filesystem::path root = generate_data(tmp);
  const std::filesystem::path serial = tmp.file("serial.csv");
  const std::filesystem::path threaded = tmp.file("threaded.csv");

  REQUIRE(run_cli(tmp, "rank --dataset-dir " + quoted(root / "train") +
                           " --method cibn-t --k 4 --alpha 1 --beta 0.3 --out " +
                           quoted(serial),
                  "CNRANK_THREADS=1")
              .exit_code == 0);
  REQUIRE(run_cli(tmp, "rank --dataset-dir " + quoted(root / "train") +
                           " --method cibn-t --k 4 --alpha 1 --beta 0.3 --out " +
                           quoted(threaded),
                  "CNRANK_THREADS=4")
              .exit_code == 0);

  const std::string serial_bytes = slurp(serial);
  REQUIRE_FALSE(serial_bytes.empty());
  CHECK(serial_bytes == slurp(threaded));
}

TEST_CASE("rank errors exit 1 with json on stderr") {
  TempDir tmp;
  const std::filesystem::path root = generate_data(tmp);

  const CliResult no_input = run_cli(tmp, "rank --method pop --out " + quoted(tmp.file("x.csv")));
  CHECK(no_input.exit_code == 1);
  CHECK(no_input.err.rfind("{", 0) == 0);
  CHECK(no_input.err.find("\"error\"") != std::string::npos);

  const CliResult no_seed = run_cli(
      tmp, "rank --dataset-dir " + quoted(root / "train") + " --method random --out " +
               quoted(tmp.file("y.csv")));
  CHECK(no_seed.exit_code == 1);
  CHECK(no_seed.err.find("seed") != std::string::npos);

  const CliResult bad_method = run_cli(
      tmp, "rank --dataset-dir " + quoted(root / "train") + " --method cubn --out " +
               quoted(tmp.file("z.csv")));
  CHECK(bad_method.exit_code == 1);
  CHECK(bad_method.err.find("\"error\"") != std::string::npos);

  const CliResult both_sources = run_cli(
      tmp, "evaluate --dataset-dir " + quoted(root / "test") + " --rankings a.csv" +
               " --scores b.csv --out " + quoted(tmp.file("r.csv")));
  CHECK(both_sources.exit_code == 1);
  CHECK(both_sources.err.find("\"error\"") != std::string::npos);
}

TEST_CASE("sweep runs the full experiment and the sensitivity kinds") {
  TempDir tmp;
  const std::filesystem::path root = generate_data(tmp);

  const std::filesystem::path spec = tmp.file("spec.json");
  write_text(spec, std::string("{\n") + "  \"methods\": [\"cubn-o\", \"pop\"],\n" +
                       "  \"k_grid\": [2, 4],\n  \"alpha_grid\": [1.0],\n" +
                       "  \"beta_grid\": [0.0, 1.0],\n  \"metrics\": [\"cp@2\"],\n" +
                       "  \"seed\": 11\n}\n");

  const std::filesystem::path full_out = tmp.file("sweep-full");
  const CliResult full = run_cli(
      tmp, "sweep --config " + quoted(spec) + " --dataset-dir " + quoted(root) +
               " --out " + quoted(full_out));
  REQUIRE(full.exit_code == 0);
  CHECK(full.out.find("\"records\":") != std::string::npos);
  const std::string records = slurp(full_out / "records.csv");
  CHECK(records.rfind("method,metric,k,alpha,beta,validation,test_cp@2,seed\n", 0) == 0);
  CHECK(std::filesystem::exists(full_out / "table_cp_at_2.csv"));
  CHECK(std::filesystem::exists(full_out / "table_cp_at_2.txt"));

  const std::filesystem::path nb_out = tmp.file("sweep-nb");
  const CliResult neighbors = run_cli(
      tmp, "sweep --config " + quoted(spec) + " --dataset-dir " + quoted(root) +
               " --kind neighbors --out " + quoted(nb_out));
  REQUIRE(neighbors.exit_code == 0);
  const std::string sweep_csv = slurp(nb_out / "sweep_neighbors.csv");
  CHECK(sweep_csv.rfind("kind,method,value,beta,metric,metric_value,k,alpha,metric_beta\n",
                        0) == 0);
  CHECK(sweep_csv.find("neighbors,cubn-o,2,") != std::string::npos);

  const CliResult bad_kind = run_cli(
      tmp, "sweep --config " + quoted(spec) + " --kind widths --out " + quoted(nb_out));
  CHECK(bad_kind.exit_code == 1);
}

TEST_CASE("match writes per-subject effects and the summary") {
  TempDir tmp;
  const std::filesystem::path panel = tmp.file("panel.csv");
  write_text(panel,
             "id,z,y,x0,x1\n"
             "s1,1,1,1,0\n"
             "s2,0,0,1,0\n"
             "s3,1,0,0,1\n"
             "s4,0,1,0,1\n");

  const std::filesystem::path effects = tmp.file("effects.csv");
  const std::filesystem::path summary = tmp.file("summary.csv");
  const CliResult match = run_cli(
      tmp, "match --panel " + quoted(panel) + " --m 1 --out " + quoted(effects) +
               " --summary-out " + quoted(summary));
  REQUIRE(match.exit_code == 0);
  CHECK(match.out.find("\"n_subjects\": 4") != std::string::npos);
  CHECK(match.out.find("\"ate\":") != std::string::npos);

  const std::string effects_text = slurp(effects);
  CHECK(effects_text.rfind("id,z,y,y_t_hat,y_c_hat,effect\n", 0) == 0);
  std::size_t lines = 0;
  for (const char c : effects_text)
    if (c == '\n') ++lines;
  CHECK(lines == 5);
  CHECK(effects_text.find("s1,1,1,") != std::string::npos);

  const std::string summary_text = slurp(summary);
  CHECK(summary_text.rfind("statistic,value\nate,", 0) == 0);
  CHECK(summary_text.find("\natt,") != std::string::npos);

  const CliResult missing = run_cli(tmp, "match --panel " + quoted(tmp.file("nope.csv")) +
                                             " --out " + quoted(effects));
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("\"error\"") != std::string::npos);
}

}  // TEST_SUITE
