#include "cnrank/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cnrank/parallel.hpp"

namespace cnrank {

std::vector<std::uint32_t> rank_row(std::span<const double> scores) {
  std::vector<std::uint32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&scores](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return order;
}

RankedLists rank_score_matrix(const DenseMatrix& scores) {
  RankedLists lists;
  lists.n_items = scores.n_cols();
  lists.items.resize(scores.n_rows());
  lists.scores.resize(scores.n_rows());
  parallel_for(scores.n_rows(), [&](std::size_t u) {
    const std::span<const double> row = scores.row(u);
    lists.items[u] = rank_row(row);
    lists.scores[u].resize(row.size());
    for (std::size_t pos = 0; pos < row.size(); ++pos) {
      lists.scores[u][pos] = row[lists.items[u][pos]];
    }
  });
  return lists;
}

void save_rankings(const std::filesystem::path& path, const RankedLists& lists) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write rankings: " + path.string());
  out << "user,item,rank,tau_hat\n";
  char buffer[64];
  for (std::size_t u = 0; u < lists.n_users(); ++u) {
    for (std::size_t pos = 0; pos < lists.items[u].size(); ++pos) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", lists.scores[u][pos]);
      out << u << ',' << lists.items[u][pos] << ',' << pos + 1 << ',' << buffer << '\n';
    }
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

RankedLists load_rankings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rankings: " + path.string());

  auto fail = [&path](std::size_t line_no, const std::string& what) -> void {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw std::runtime_error("empty rankings file: " + path.string());
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "user,item,rank,tau_hat") fail(line_no, "expected header user,item,rank,tau_hat");

  RankedLists lists;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::size_t user, rank;
    std::uint32_t item;
    double score;
    char c1, c2, c3;
    if (!(fields >> user >> c1 >> item >> c2 >> rank >> c3 >> score) || c1 != ',' ||
        c2 != ',' || c3 != ',') {
      fail(line_no, "malformed ranking line");
    }
    if (user >= lists.items.size()) {
      lists.items.resize(user + 1);
      lists.scores.resize(user + 1);
    }
    if (rank != lists.items[user].size() + 1) {
      fail(line_no, "rank " + std::to_string(rank) + " out of sequence for user " +
                        std::to_string(user));
    }
    lists.items[user].push_back(item);
    lists.scores[user].push_back(score);
  }

  for (std::size_t u = 0; u < lists.n_users(); ++u) {
    lists.n_items = std::max(lists.n_items, lists.items[u].size());
  }
  std::vector<std::uint8_t> seen(lists.n_items);
  for (std::size_t u = 0; u < lists.n_users(); ++u) {
    if (lists.items[u].size() != lists.n_items) {
      throw std::runtime_error("user " + std::to_string(u) + " ranks " +
                               std::to_string(lists.items[u].size()) + " items, expected " +
                               std::to_string(lists.n_items));
    }
    std::fill(seen.begin(), seen.end(), 0);
    for (std::uint32_t item : lists.items[u]) {
      if (item >= lists.n_items || seen[item]) {
        throw std::runtime_error("rankings for user " + std::to_string(u) +
                                 " are not a permutation of all items");
      }
      seen[item] = 1;
    }
  }
  return lists;
}

DenseMatrix load_score_table(const std::filesystem::path& path, std::size_t n_users,
                             std::size_t n_items) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open score file: " + path.string());

  auto fail = [&path](std::size_t line_no, const std::string& what) -> void {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw std::runtime_error("empty score file: " + path.string());
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "user,item,score") fail(line_no, "expected header user,item,score");

  DenseMatrix scores(n_users, n_items);
  std::vector<std::uint8_t> seen(n_users * n_items);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::size_t user, item;
    double score;
    char c1, c2;
    if (!(fields >> user >> c1 >> item >> c2 >> score) || c1 != ',' || c2 != ',') {
      fail(line_no, "malformed score line");
    }
    if (user >= n_users || item >= n_items) {
      fail(line_no, "(user, item) = (" + std::to_string(user) + ", " + std::to_string(item) +
                        ") outside " + std::to_string(n_users) + "x" + std::to_string(n_items));
    }
    if (!std::isfinite(score)) fail(line_no, "score is not finite");
    if (seen[user * n_items + item]) {
      fail(line_no, "duplicate (user, item) pair");
    }
    seen[user * n_items + item] = 1;
    scores.at(user, item) = score;
  }
  return scores;
}

}  // namespace cnrank
