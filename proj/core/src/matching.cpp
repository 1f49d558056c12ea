#include "cnrank/matching.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cnrank/parallel.hpp"
#include "cnrank/similarity.hpp"

namespace cnrank {

namespace {

struct ScoredSubject {
  double similarity;
  std::uint32_t index;
};

bool nearer(const ScoredSubject& a, const ScoredSubject& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.index < b.index;
}

std::vector<std::uint32_t> nearest_m(const std::vector<ScoredSubject>& group, std::size_t m) {
  std::vector<ScoredSubject> sorted = group;
  std::sort(sorted.begin(), sorted.end(), nearer);
  if (sorted.size() > m) sorted.resize(m);
  std::vector<std::uint32_t> indices;
  indices.reserve(sorted.size());
  for (const ScoredSubject& s : sorted) indices.push_back(s.index);
  return indices;
}

double mean_outcome(const SubjectPanel& panel, const std::vector<std::uint32_t>& matched,
                    std::size_t subject, const char* set_name) {
  if (matched.empty()) {
    throw std::invalid_argument("empty " + std::string(set_name) + " matched set for subject " +
                                std::to_string(subject));
  }
  double sum = 0.0;
  for (std::uint32_t idx : matched) sum += panel.y[idx];
  return sum / static_cast<double>(matched.size());
}

}  // namespace

void SubjectPanel::validate() const {
  const std::size_t n = y.size();
  if (z.size() != n || covariates.size() != n) {
    throw std::invalid_argument("panel field lengths disagree");
  }
  if (!ids.empty() && ids.size() != n) {
    throw std::invalid_argument("panel id count disagrees with subject count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] > 1) throw std::invalid_argument("y must be 0/1 at subject " + std::to_string(i));
    if (z[i] > 1) throw std::invalid_argument("z must be 0/1 at subject " + std::to_string(i));
    const std::vector<std::uint32_t>& cov = covariates[i];
    for (std::size_t j = 0; j < cov.size(); ++j) {
      if (cov[j] >= n_features) {
        throw std::invalid_argument("covariate index out of range at subject " +
                                    std::to_string(i));
      }
      if (j > 0 && cov[j] <= cov[j - 1]) {
        throw std::invalid_argument("covariate indices not strictly increasing at subject " +
                                    std::to_string(i));
      }
    }
  }
}

MatchedSets match_subjects(const SubjectPanel& panel, std::size_t m) {
  panel.validate();
  const std::size_t n = panel.n_subjects();

  MatchedSets matches;
  matches.treated.resize(n);
  matches.control.resize(n);
  if (m == 0) return matches;

  bool has_treated = false, has_control = false;
  for (std::size_t v = 0; v < n; ++v) {
    (panel.z[v] ? has_treated : has_control) = true;
  }
  if (!has_treated) throw std::invalid_argument("no treated subjects to match against");
  if (!has_control) throw std::invalid_argument("no control subjects to match against");

  parallel_for(n, [&](std::size_t s) {
    const SparseVectorView own{panel.n_features, panel.covariates[s]};
    std::vector<ScoredSubject> treated_group;
    std::vector<ScoredSubject> control_group;
    for (std::uint32_t v = 0; v < n; ++v) {
      const double sim = cosine(own, SparseVectorView{panel.n_features, panel.covariates[v]});
      (panel.z[v] ? treated_group : control_group).push_back({sim, v});
    }
    matches.treated[s] = nearest_m(treated_group, m);
    matches.control[s] = nearest_m(control_group, m);
  });
  return matches;
}

CounterfactualEstimates estimate_counterfactuals(const SubjectPanel& panel,
                                                 const MatchedSets& matches) {
  const std::size_t n = panel.n_subjects();
  if (matches.treated.size() != n || matches.control.size() != n) {
    throw std::invalid_argument("matched sets do not cover the panel");
  }
  CounterfactualEstimates est;
  est.y_t_hat.resize(n);
  est.y_c_hat.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    est.y_t_hat[s] = mean_outcome(panel, matches.treated[s], s, "treated");
    est.y_c_hat[s] = mean_outcome(panel, matches.control[s], s, "control");
  }
  return est;
}

std::vector<double> per_subject_effect(const SubjectPanel& panel,
                                       const CounterfactualEstimates& estimates) {
  const std::size_t n = panel.n_subjects();
  if (estimates.y_t_hat.size() != n || estimates.y_c_hat.size() != n) {
    throw std::invalid_argument("estimates do not cover the panel");
  }
  std::vector<double> effects(n);
  for (std::size_t s = 0; s < n; ++s) {
    effects[s] = panel.z[s] ? panel.y[s] - estimates.y_c_hat[s]
                            : estimates.y_t_hat[s] - panel.y[s];
  }
  return effects;
}

double aggregate(const std::vector<double>& effects, AggregateMode mode,
                 const std::vector<std::uint8_t>& z) {
  if (effects.size() != z.size()) {
    throw std::invalid_argument("effects and treatments have different lengths");
  }
  if (effects.empty()) throw std::invalid_argument("cannot aggregate an empty subject set");

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < effects.size(); ++s) {
    if (mode == AggregateMode::att && !z[s]) continue;
    sum += effects[s];
    ++count;
  }
  if (count == 0) throw std::invalid_argument("att requires at least one treated subject");
  return sum / static_cast<double>(count);
}

SubjectPanel load_panel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open panel file: " + path.string());

  auto fail = [&path](std::size_t line_no, const std::string& what) -> void {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
  };

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw std::runtime_error("empty panel file: " + path.string());
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split(line);
  long id_col = -1, z_col = -1, y_col = -1;
  std::vector<std::size_t> cov_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "id") id_col = static_cast<long>(c);
    else if (header[c] == "z") z_col = static_cast<long>(c);
    else if (header[c] == "y") y_col = static_cast<long>(c);
    else cov_cols.push_back(c);
  }
  if (id_col < 0 || z_col < 0 || y_col < 0) {
    fail(line_no, "header must contain columns id, z, y");
  }

  SubjectPanel panel;
  panel.n_features = cov_cols.size();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header.size()) {
      fail(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    auto parse_bit = [&](std::size_t col, const char* name) -> std::uint8_t {
      const std::string& f = fields[col];
      if (f == "0") return 0;
      if (f == "1") return 1;
      fail(line_no, std::string(name) + " must be 0 or 1, got '" + f + "'");
      return 0;  // unreachable
    };
    panel.ids.push_back(fields[static_cast<std::size_t>(id_col)]);
    panel.z.push_back(parse_bit(static_cast<std::size_t>(z_col), "z"));
    panel.y.push_back(parse_bit(static_cast<std::size_t>(y_col), "y"));
    std::vector<std::uint32_t> cov;
    for (std::size_t j = 0; j < cov_cols.size(); ++j) {
      if (parse_bit(cov_cols[j], header[cov_cols[j]].c_str())) {
        cov.push_back(static_cast<std::uint32_t>(j));
      }
    }
    panel.covariates.push_back(std::move(cov));
  }
  panel.validate();
  return panel;
}

}  // namespace cnrank
