#include "cnrank/dataset.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cnrank/io.hpp"

namespace cnrank {

namespace {

bool valid_split_label(const std::string& label) {
  return label == "train" || label == "validation" || label == "test";
}

void require_same_shape(const char* name, std::size_t rows, std::size_t cols,
                        std::size_t ref_rows, std::size_t ref_cols) {
  if (rows != ref_rows || cols != ref_cols) {
    throw std::invalid_argument(std::string(name) + " has shape " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", expected " + std::to_string(ref_rows) +
                                "x" + std::to_string(ref_cols));
  }
}

}  // namespace

void PriorTables::validate() const {
  require_same_shape("mu_c", mu_c.n_rows(), mu_c.n_cols(), mu_t.n_rows(), mu_t.n_cols());
  require_same_shape("propensity", propensity.n_rows(), propensity.n_cols(), mu_t.n_rows(),
                     mu_t.n_cols());
  for (const DenseMatrix* m : {&mu_t, &mu_c, &propensity}) {
    for (std::size_t r = 0; r < m->n_rows(); ++r) {
      for (std::size_t c = 0; c < m->n_cols(); ++c) {
        const double v = m->at(r, c);
        if (!(v >= 0.0 && v <= 1.0)) {
          throw std::invalid_argument("probability out of [0,1] at (" + std::to_string(r) + ", " +
                                      std::to_string(c) + "): " + std::to_string(v));
        }
      }
    }
  }
}

void GeneratedDataset::validate() const {
  const std::size_t rows = y_t.n_rows();
  const std::size_t cols = y_t.n_cols();
  require_same_shape("y_c", y_c.n_rows(), y_c.n_cols(), rows, cols);
  require_same_shape("z", z.n_rows(), z.n_cols(), rows, cols);
  require_same_shape("y", y.n_rows(), y.n_cols(), rows, cols);
  require_same_shape("tau", tau.n_rows(), tau.n_cols(), rows, cols);
  if (!valid_split_label(split_label)) {
    throw std::invalid_argument("invalid split label: '" + split_label + "'");
  }
  if (!user_ids.empty() && user_ids.size() != rows) {
    throw std::invalid_argument("user id dictionary size does not match row count");
  }
  if (!item_ids.empty() && item_ids.size() != cols) {
    throw std::invalid_argument("item id dictionary size does not match column count");
  }

  // y = z*y_t + (1-z)*y_c reduces on binary matrices to: y picks y_t where
  // z=1 and y_c where z=0. Checked cell by cell over the union of supports.
  for (std::size_t u = 0; u < rows; ++u) {
    for (std::uint32_t i : y_t.row(u)) {
      const int expected_y = z.value(u, i) ? 1 : y_c.value(u, i);
      if (y.value(u, i) != expected_y) {
        throw std::invalid_argument("observed outcome mismatch at (" + std::to_string(u) + ", " +
                                    std::to_string(i) + ")");
      }
    }
    for (std::uint32_t i : y_c.row(u)) {
      const int expected_y = z.value(u, i) ? y_t.value(u, i) : 1;
      if (y.value(u, i) != expected_y) {
        throw std::invalid_argument("observed outcome mismatch at (" + std::to_string(u) + ", " +
                                    std::to_string(i) + ")");
      }
    }
    for (std::uint32_t i : y.row(u)) {
      if (!y_t.value(u, i) && !y_c.value(u, i)) {
        throw std::invalid_argument("observed outcome without potential outcome at (" +
                                    std::to_string(u) + ", " + std::to_string(i) + ")");
      }
    }
  }
  if (tau != SparseTernaryMatrix::difference(y_t, y_c)) {
    throw std::invalid_argument("tau does not equal y_t - y_c");
  }
}

std::filesystem::path save_dataset(const GeneratedDataset& ds, const std::filesystem::path& dir) {
  ds.validate();
  std::filesystem::create_directories(dir);

  write_matrix(dir / "y_t.txt", ds.y_t);
  write_matrix(dir / "y_c.txt", ds.y_c);
  write_matrix(dir / "z.txt", ds.z);
  write_matrix(dir / "y.txt", ds.y);
  write_matrix(dir / "tau.txt", ds.tau);

  nlohmann::json manifest;
  manifest["seed"] = ds.seed;
  manifest["n_users"] = ds.n_users();
  manifest["n_items"] = ds.n_items();
  manifest["split"] = ds.split_label;
  manifest["params"] = ds.params;
  if (!ds.user_ids.empty()) manifest["user_ids"] = ds.user_ids;
  if (!ds.item_ids.empty()) manifest["item_ids"] = ds.item_ids;

  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + manifest_path.string());
  out << manifest.dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + manifest_path.string());
  return manifest_path;
}

GeneratedDataset load_dataset(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed manifest " + manifest_path.string() + ": " + e.what());
  }

  GeneratedDataset ds;
  try {
    ds.seed = manifest.at("seed").get<std::uint64_t>();
    ds.split_label = manifest.at("split").get<std::string>();
    ds.params = manifest.at("params").get<std::map<std::string, double>>();
    if (manifest.contains("user_ids")) {
      ds.user_ids = manifest.at("user_ids").get<std::vector<std::string>>();
    }
    if (manifest.contains("item_ids")) {
      ds.item_ids = manifest.at("item_ids").get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed manifest " + manifest_path.string() + ": " + e.what());
  }

  ds.y_t = read_binary_matrix(dir / "y_t.txt");
  ds.y_c = read_binary_matrix(dir / "y_c.txt");
  ds.z = read_binary_matrix(dir / "z.txt");
  ds.y = read_binary_matrix(dir / "y.txt");
  ds.tau = read_ternary_matrix(dir / "tau.txt");

  const auto n_users = manifest.at("n_users").get<std::size_t>();
  const auto n_items = manifest.at("n_items").get<std::size_t>();
  if (ds.y.n_rows() != n_users || ds.y.n_cols() != n_items) {
    throw std::runtime_error("matrix shape disagrees with manifest in " + dir.string());
  }
  ds.validate();
  return ds;
}

}  // namespace cnrank
