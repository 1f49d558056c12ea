#include "cnrank/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "cnrank/parallel.hpp"

namespace cnrank {

namespace {

/// Compensated (Neumaier) mean in ascending index order, so parallel
/// per-user computation still reduces to one fixed float result.
double compensated_mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  double correction = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      correction += (sum - t) + v;
    } else {
      correction += (v - t) + sum;
    }
    sum = t;
  }
  return (sum + correction) / static_cast<double>(values.size());
}

void check_coverage(const RankedLists& rankings, const SparseTernaryMatrix& tau) {
  if (rankings.n_users() != tau.n_rows()) {
    std::string missing;
    for (std::size_t u = rankings.n_users(); u < tau.n_rows(); ++u) {
      if (!missing.empty()) missing += ", ";
      missing += std::to_string(u);
      if (missing.size() > 80) {
        missing += ", ...";
        break;
      }
    }
    if (rankings.n_users() < tau.n_rows()) {
      throw std::invalid_argument("rankings missing users: " + missing);
    }
    throw std::invalid_argument("rankings cover " + std::to_string(rankings.n_users()) +
                                " users, dataset has " + std::to_string(tau.n_rows()));
  }
  if (rankings.n_items != tau.n_cols()) {
    throw std::invalid_argument("rankings cover " + std::to_string(rankings.n_items) +
                                " items, dataset has " + std::to_string(tau.n_cols()));
  }
}

void check_cutoffs(std::span<const std::size_t> cutoffs, std::size_t n_items) {
  for (std::size_t n : cutoffs) {
    if (n < 1 || n > n_items) {
      throw std::invalid_argument("cutoff " + std::to_string(n) + " outside [1, " +
                                  std::to_string(n_items) + "]");
    }
  }
}

/// Ranks of every item for one user, 1-based, scattered from the ranked list.
void fill_positions(const std::vector<std::uint32_t>& ranked_items,
                    std::vector<std::uint32_t>& positions) {
  positions.resize(ranked_items.size());
  for (std::size_t pos = 0; pos < ranked_items.size(); ++pos) {
    positions[ranked_items[pos]] = static_cast<std::uint32_t>(pos + 1);
  }
}

struct PerUserMetrics {
  std::vector<std::vector<double>> cp;  // [cutoff][user]
  std::vector<double> cdcg;
  std::vector<double> car;
};

PerUserMetrics per_user_metrics(const RankedLists& rankings, const SparseTernaryMatrix& tau,
                                std::span<const std::size_t> cutoffs) {
  check_coverage(rankings, tau);
  check_cutoffs(cutoffs, tau.n_cols());

  const std::size_t n_users = rankings.n_users();
  const double n_items = static_cast<double>(tau.n_cols());
  PerUserMetrics out;
  out.cp.assign(cutoffs.size(), std::vector<double>(n_users, 0.0));
  out.cdcg.assign(n_users, 0.0);
  out.car.assign(n_users, 0.0);

  parallel_for(n_users, [&](std::size_t u) {
    thread_local std::vector<std::uint32_t> positions;
    fill_positions(rankings.items[u], positions);

    const std::span<const std::uint32_t> cols = tau.row_cols(u);
    const std::span<const std::int8_t> vals = tau.row_vals(u);
    double cdcg_sum = 0.0;
    double rank_sum = 0.0;
    for (std::size_t idx = 0; idx < cols.size(); ++idx) {
      const double v = vals[idx];
      const std::uint32_t pos = positions[cols[idx]];
      cdcg_sum += v / std::log2(1.0 + static_cast<double>(pos));
      rank_sum += static_cast<double>(pos) * v;
      for (std::size_t c = 0; c < cutoffs.size(); ++c) {
        if (pos <= cutoffs[c]) out.cp[c][u] += v;
      }
    }
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      out.cp[c][u] /= static_cast<double>(cutoffs[c]);
    }
    out.cdcg[u] = cdcg_sum;
    out.car[u] = rank_sum / n_items;
  });
  return out;
}

}  // namespace

double cp_at_n(const RankedLists& rankings, const SparseTernaryMatrix& tau, std::size_t n) {
  const std::size_t cutoffs[] = {n};
  return compensated_mean(per_user_metrics(rankings, tau, cutoffs).cp[0]);
}

double cdcg(const RankedLists& rankings, const SparseTernaryMatrix& tau) {
  return compensated_mean(per_user_metrics(rankings, tau, {}).cdcg);
}

double car(const RankedLists& rankings, const SparseTernaryMatrix& tau) {
  return compensated_mean(per_user_metrics(rankings, tau, {}).car);
}

MetricReport evaluate_against(const RankedLists& rankings, const SparseTernaryMatrix& tau,
                              std::span<const std::size_t> cutoffs, bool per_user) {
  PerUserMetrics per = per_user_metrics(rankings, tau, cutoffs);

  MetricReport report;
  report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
  report.cp_at.reserve(cutoffs.size());
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    report.cp_at.push_back(compensated_mean(per.cp[c]));
  }
  report.cdcg = compensated_mean(per.cdcg);
  report.car = compensated_mean(per.car);
  if (per_user) {
    report.per_user_cp = std::move(per.cp);
    report.per_user_cdcg = std::move(per.cdcg);
    report.per_user_car = std::move(per.car);
  }
  return report;
}

MetricReport evaluate(const RankedLists& rankings, const GeneratedDataset& dataset,
                      std::span<const std::size_t> cutoffs, bool per_user) {
  return evaluate_against(rankings, dataset.tau, cutoffs, per_user);
}

void save_report_csv(const std::filesystem::path& path, const MetricReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report: " + path.string());
  char buffer[64];
  out << "metric,value\n";
  for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", report.cp_at[c]);
    out << "cp@" << report.cutoffs[c] << ',' << buffer << '\n';
  }
  std::snprintf(buffer, sizeof(buffer), "%.17g", report.cdcg);
  out << "cdcg," << buffer << '\n';
  std::snprintf(buffer, sizeof(buffer), "%.17g", report.car);
  out << "car," << buffer << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void save_report_json(const std::filesystem::path& path, const MetricReport& report) {
  nlohmann::json doc;
  doc["cp"] = nlohmann::json::array();
  for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
    doc["cp"].push_back({{"n", report.cutoffs[c]}, {"value", report.cp_at[c]}});
  }
  doc["cdcg"] = report.cdcg;
  doc["car"] = report.car;
  if (!report.per_user_cdcg.empty()) {
    nlohmann::json per;
    for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
      per["cp@" + std::to_string(report.cutoffs[c])] = report.per_user_cp[c];
    }
    per["cdcg"] = report.per_user_cdcg;
    per["car"] = report.per_user_car;
    doc["per_user"] = std::move(per);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report: " + path.string());
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void save_per_user_csv(const std::filesystem::path& path, const MetricReport& report) {
  if (report.per_user_cdcg.empty()) {
    throw std::invalid_argument("report has no per-user breakdown");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write per-user report: " + path.string());
  out << "user";
  for (std::size_t n : report.cutoffs) out << ",cp@" << n;
  out << ",cdcg,car\n";
  char buffer[64];
  for (std::size_t u = 0; u < report.per_user_cdcg.size(); ++u) {
    out << u;
    for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", report.per_user_cp[c][u]);
      out << ',' << buffer;
    }
    std::snprintf(buffer, sizeof(buffer), "%.17g", report.per_user_cdcg[u]);
    out << ',' << buffer;
    std::snprintf(buffer, sizeof(buffer), "%.17g", report.per_user_car[u]);
    out << ',' << buffer << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace cnrank
