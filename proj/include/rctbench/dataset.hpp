#ifndef RCTBENCH_DATASET_HPP
#define RCTBENCH_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rctbench {

// Fault type for contract violations (bad inputs, broken preconditions).
// Data-quality findings that are expected outcomes (e.g. validation reports)
// are returned as values instead.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Row-wise sparse 0/1 matrix: per row, the sorted column ids that are 1.
struct SparseBinaryMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::vector<std::uint32_t>> rows;

  std::size_t nnz() const {
    std::size_t s = 0;
    for (const auto& r : rows) s += r.size();
    return s;
  }
};

// Immutable-by-convention dataset: named real covariate columns, optional
// sparse binary proxy features, binary treatment, real outcome. Columns are
// stored column-major; all columns have exactly n_rows entries.
struct TabularDataset {
  std::size_t n_rows = 0;
  std::vector<std::string> covariate_names;
  std::vector<std::vector<double>> covariates;
  std::optional<SparseBinaryMatrix> proxies;
  std::vector<std::int8_t> treatment;
  std::vector<double> outcome;

  int covariate_index(std::string_view name) const {
    for (std::size_t j = 0; j < covariate_names.size(); ++j) {
      if (covariate_names[j] == name) return static_cast<int>(j);
    }
    return -1;
  }

  bool has_covariate(std::string_view name) const {
    return covariate_index(name) >= 0;
  }

  const std::vector<double>& covariate(std::string_view name) const {
    int j = covariate_index(name);
    if (j < 0) throw Error("unknown covariate: " + std::string(name));
    return covariates[static_cast<std::size_t>(j)];
  }
};

struct Violation {
  std::string column;
  std::optional<std::size_t> row;
  std::string message;
};

// Empty result iff all structural invariants hold. Never throws, never
// mutates.
inline std::vector<Violation> validate(const TabularDataset& d) {
  std::vector<Violation> out;
  auto add = [&](std::string column, std::optional<std::size_t> row,
                 std::string msg) {
    out.push_back({std::move(column), row, std::move(msg)});
  };

  if (d.covariates.size() != d.covariate_names.size()) {
    add("<covariates>", std::nullopt,
        "covariate matrix has " + std::to_string(d.covariates.size()) +
            " columns but " + std::to_string(d.covariate_names.size()) +
            " names");
  }
  if (d.treatment.size() != d.n_rows) {
    add("T", std::nullopt, "treatment column has " +
                               std::to_string(d.treatment.size()) +
                               " entries, expected " +
                               std::to_string(d.n_rows));
  }
  if (d.outcome.size() != d.n_rows) {
    add("Y", std::nullopt, "outcome column has " +
                               std::to_string(d.outcome.size()) +
                               " entries, expected " +
                               std::to_string(d.n_rows));
  }
  for (std::size_t j = 0;
       j < std::min(d.covariates.size(), d.covariate_names.size()); ++j) {
    if (d.covariates[j].size() != d.n_rows) {
      add(d.covariate_names[j], std::nullopt,
          "column has " + std::to_string(d.covariates[j].size()) +
              " entries, expected " + std::to_string(d.n_rows));
      continue;
    }
    for (std::size_t i = 0; i < d.covariates[j].size(); ++i) {
      if (!std::isfinite(d.covariates[j][i])) {
        add(d.covariate_names[j], i, "missing or non-finite value");
        break;  // one report per column is enough for a diagnosis
      }
    }
  }
  for (std::size_t i = 0; i < std::min(d.treatment.size(), d.n_rows); ++i) {
    if (d.treatment[i] != 0 && d.treatment[i] != 1) {
      add("T", i,
          "treatment value " + std::to_string(int(d.treatment[i])) +
              " is not in {0,1}");
      break;
    }
  }
  for (std::size_t i = 0; i < std::min(d.outcome.size(), d.n_rows); ++i) {
    if (!std::isfinite(d.outcome[i])) {
      add("Y", i, "missing or non-finite outcome");
      break;
    }
  }
  if (d.proxies) {
    const auto& p = *d.proxies;
    if (p.n_rows != d.n_rows) {
      add("X", std::nullopt,
          "proxy matrix has " + std::to_string(p.n_rows) +
              " rows, expected " + std::to_string(d.n_rows));
    }
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
      std::uint32_t prev = 0;
      bool first = true;
      for (std::uint32_t c : p.rows[i]) {
        if (c >= p.n_cols) {
          add("X", i, "proxy column id out of range");
          break;
        }
        if (!first && c <= prev) {
          add("X", i, "proxy column ids not strictly increasing");
          break;
        }
        prev = c;
        first = false;
      }
    }
  }
  return out;
}

inline void require_valid(const TabularDataset& d) {
  auto violations = validate(d);
  if (violations.empty()) return;
  std::string msg = "invalid dataset:";
  for (std::size_t k = 0; k < std::min<std::size_t>(3, violations.size());
       ++k) {
    const auto& v = violations[k];
    msg += " [" + v.column;
    if (v.row) msg += " row " + std::to_string(*v.row);
    msg += ": " + v.message + "]";
  }
  if (violations.size() > 3) {
    msg += " (+" + std::to_string(violations.size() - 3) + " more)";
  }
  throw Error(msg);
}

struct SummaryStats {
  std::optional<double> mean_outcome_control;  // unset when the arm is empty
  std::optional<double> mean_outcome_treated;
  double treated_fraction = 0.0;
  std::vector<double> covariate_means;
};

inline SummaryStats summary(const TabularDataset& d) {
  SummaryStats s;
  if (d.n_rows == 0) return s;
  double sum1 = 0.0, sum0 = 0.0;
  std::size_t n1 = 0;
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    if (d.treatment[i] == 1) {
      sum1 += d.outcome[i];
      ++n1;
    } else {
      sum0 += d.outcome[i];
    }
  }
  std::size_t n0 = d.n_rows - n1;
  if (n1 > 0) s.mean_outcome_treated = sum1 / static_cast<double>(n1);
  if (n0 > 0) s.mean_outcome_control = sum0 / static_cast<double>(n0);
  s.treated_fraction =
      static_cast<double>(n1) / static_cast<double>(d.n_rows);
  s.covariate_means.reserve(d.covariates.size());
  for (const auto& col : d.covariates) {
    double acc = 0.0;
    for (double v : col) acc += v;
    s.covariate_means.push_back(acc / static_cast<double>(d.n_rows));
  }
  return s;
}

inline std::size_t count_treated(const TabularDataset& d) {
  std::size_t n1 = 0;
  for (auto t : d.treatment) n1 += (t == 1);
  return n1;
}

inline void require_both_arms(const TabularDataset& d,
                              std::string_view caller) {
  std::size_t n1 = count_treated(d);
  if (n1 == 0 || n1 == d.n_rows) {
    throw Error(std::string(caller) + ": dataset must contain both " +
                "treatment arms (treated=" + std::to_string(n1) + " of " +
                std::to_string(d.n_rows) + ")");
  }
}

// Gathers the given rows (repeats allowed) into `out`, reusing its storage.
inline void gather_rows(const TabularDataset& d,
                        std::span<const std::size_t> idx,
                        TabularDataset& out) {
  out.n_rows = idx.size();
  out.covariate_names = d.covariate_names;
  out.covariates.resize(d.covariates.size());
  for (std::size_t j = 0; j < d.covariates.size(); ++j) {
    out.covariates[j].resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.covariates[j][i] = d.covariates[j][idx[i]];
    }
  }
  out.treatment.resize(idx.size());
  out.outcome.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.treatment[i] = d.treatment[idx[i]];
    out.outcome[i] = d.outcome[idx[i]];
  }
  if (d.proxies) {
    SparseBinaryMatrix p;
    p.n_rows = idx.size();
    p.n_cols = d.proxies->n_cols;
    p.rows.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      p.rows[i] = d.proxies->rows[idx[i]];
    }
    out.proxies = std::move(p);
  } else {
    out.proxies.reset();
  }
}

inline TabularDataset select_rows(const TabularDataset& d,
                                  std::span<const std::size_t> idx) {
  TabularDataset out;
  gather_rows(d, idx, out);
  return out;
}

inline TabularDataset select_rows(const TabularDataset& d,
                                  const std::vector<char>& keep) {
  std::vector<std::size_t> idx;
  idx.reserve(d.n_rows);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i]) idx.push_back(i);
  }
  return select_rows(d, std::span<const std::size_t>(idx));
}

}  // namespace rctbench

#endif  // RCTBENCH_DATASET_HPP
