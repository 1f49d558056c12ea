#include "cnrank/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cnrank {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path.string());
  }
  return in;
}

[[noreturn]] void bad_line(const std::filesystem::path& path, std::size_t line_no,
                           const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

struct Header {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
};

Header read_header(std::ifstream& in, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line)) bad_line(path, 1, "missing dimension header");
  std::istringstream iss(line);
  Header h;
  if (!(iss >> h.n_rows >> h.n_cols)) bad_line(path, 1, "malformed dimension header");
  std::string extra;
  if (iss >> extra) bad_line(path, 1, "trailing tokens in dimension header");
  return h;
}

void check_commit(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void write_matrix(const std::filesystem::path& path, const SparseBinaryMatrix& m) {
  auto out = open_out(path);
  out << m.n_rows() << ' ' << m.n_cols() << '\n';
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    for (const std::uint32_t c : m.row(r)) {
      out << r << ' ' << c << " 1\n";
    }
  }
  check_commit(out, path);
}

void write_matrix(const std::filesystem::path& path, const SparseTernaryMatrix& m) {
  auto out = open_out(path);
  out << m.n_rows() << ' ' << m.n_cols() << '\n';
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    const auto cols = m.row_cols(r);
    const auto vals = m.row_vals(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out << r << ' ' << cols[k] << ' ' << static_cast<int>(vals[k]) << '\n';
    }
  }
  check_commit(out, path);
}

void write_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = open_out(path);
  char buffer[64];
  out << m.n_rows() << ' ' << m.n_cols() << '\n';
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    for (std::size_t c = 0; c < m.n_cols(); ++c) {
      // %.17g round-trips doubles exactly.
      std::snprintf(buffer, sizeof(buffer), "%.17g", m.at(r, c));
      out << r << ' ' << c << ' ' << buffer << '\n';
    }
  }
  check_commit(out, path);
}

SparseBinaryMatrix read_binary_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  const Header h = read_header(in, path);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::size_t r = 0, c = 0;
    int v = 0;
    if (!(iss >> r >> c >> v)) bad_line(path, line_no, "malformed triplet");
    if (v != 1) bad_line(path, line_no, "binary matrix entry must be 1");
    if (r >= h.n_rows || c >= h.n_cols) bad_line(path, line_no, "index out of range");
    entries.emplace_back(static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c));
  }
  return SparseBinaryMatrix::from_triplets(h.n_rows, h.n_cols, std::move(entries));
}

SparseTernaryMatrix read_ternary_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  const Header h = read_header(in, path);
  std::vector<std::vector<std::pair<std::uint32_t, int>>> rows(h.n_rows);
  std::string line;
  std::size_t line_no = 1;
  std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, int>> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::size_t r = 0, c = 0;
    int v = 0;
    if (!(iss >> r >> c >> v)) bad_line(path, line_no, "malformed triplet");
    if (v != 1 && v != -1) bad_line(path, line_no, "ternary entry must be -1 or 1");
    if (r >= h.n_rows || c >= h.n_cols) bad_line(path, line_no, "index out of range");
    entries.push_back({{static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c)}, v});
  }
  std::sort(entries.begin(), entries.end());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k > 0 && entries[k].first == entries[k - 1].first) {
      throw std::runtime_error(path.string() + ": duplicate entry at (" +
                               std::to_string(entries[k].first.first) + ", " +
                               std::to_string(entries[k].first.second) + ")");
    }
    rows[entries[k].first.first].emplace_back(entries[k].first.second, entries[k].second);
  }
  return SparseTernaryMatrix(h.n_rows, h.n_cols, rows);
}

DenseMatrix read_dense_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  const Header h = read_header(in, path);
  DenseMatrix m(h.n_rows, h.n_cols);
  std::vector<bool> seen(h.n_rows * h.n_cols, false);
  std::string line;
  std::size_t line_no = 1;
  std::size_t filled = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::size_t r = 0, c = 0;
    double v = 0.0;
    if (!(iss >> r >> c >> v)) bad_line(path, line_no, "malformed triplet");
    if (r >= h.n_rows || c >= h.n_cols) bad_line(path, line_no, "index out of range");
    const std::size_t flat = r * h.n_cols + c;
    if (seen[flat]) bad_line(path, line_no, "duplicate cell");
    seen[flat] = true;
    ++filled;
    m.at(r, c) = v;
  }
  if (filled != h.n_rows * h.n_cols) {
    throw std::runtime_error(path.string() + ": dense matrix requires all cells; got " +
                             std::to_string(filled) + " of " +
                             std::to_string(h.n_rows * h.n_cols));
  }
  return m;
}

}  // namespace cnrank
