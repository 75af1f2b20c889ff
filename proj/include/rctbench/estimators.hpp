#ifndef RCTBENCH_ESTIMATORS_HPP
#define RCTBENCH_ESTIMATORS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rctbench/dataset.hpp"

namespace rctbench {

struct EstimateRecord {
  std::string estimator_name;
  double point_estimate = 0.0;
  std::optional<std::pair<double, double>> bootstrap_ci;
  std::size_t n_used = 0;
  std::string provenance;
};

// E[Y | T=1] - E[Y | T=0].
inline EstimateRecord diff_in_means(const TabularDataset& d) {
  require_both_arms(d, "diff_in_means");
  auto s = summary(d);
  EstimateRecord r;
  r.estimator_name = "dim";
  r.point_estimate = *s.mean_outcome_treated - *s.mean_outcome_control;
  r.n_used = d.n_rows;
  return r;
}

// Backdoor adjustment from the 2x2x2 contingency table:
//   sum_c P(c) * (E[Y | T=1, c] - E[Y | T=0, c]).
// T and the adjustment covariate must be binary and every (t, c) cell
// non-empty (overlap).
inline EstimateRecord exact_backdoor_binary(const TabularDataset& d,
                                            std::string_view adj_covariate) {
  const auto& c = d.covariate(adj_covariate);
  double count[2][2] = {{0, 0}, {0, 0}};
  double ysum[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    double cv = c[i];
    if (cv != 0.0 && cv != 1.0) {
      throw Error("exact_backdoor_binary: covariate " +
                  std::string(adj_covariate) + " is not binary at row " +
                  std::to_string(i));
    }
    int ci = cv == 1.0 ? 1 : 0;
    int ti = d.treatment[i] == 1 ? 1 : 0;
    count[ti][ci] += 1.0;
    ysum[ti][ci] += d.outcome[i];
  }
  for (int t = 0; t < 2; ++t) {
    for (int cc = 0; cc < 2; ++cc) {
      if (count[t][cc] == 0.0) {
        throw Error("exact_backdoor_binary: empty cell (T=" +
                    std::to_string(t) + ", " + std::string(adj_covariate) +
                    "=" + std::to_string(cc) + "); overlap violated");
      }
    }
  }
  double n = static_cast<double>(d.n_rows);
  double ate = 0.0;
  for (int cc = 0; cc < 2; ++cc) {
    double pc = (count[0][cc] + count[1][cc]) / n;
    double m1 = ysum[1][cc] / count[1][cc];
    double m0 = ysum[0][cc] / count[0][cc];
    ate += pc * (m1 - m0);
  }
  EstimateRecord r;
  r.estimator_name = "backdoor_exact";
  r.point_estimate = ate;
  r.n_used = d.n_rows;
  r.provenance = "adjust=" + std::string(adj_covariate);
  return r;
}

// One regression term: the product of the named covariates, optionally
// multiplied by the treatment indicator.
struct AdjustmentTerm {
  bool with_treatment = false;
  std::vector<std::string> covariates;

  std::string label() const {
    std::string s = with_treatment ? "T" : "";
    for (const auto& c : covariates) {
      if (!s.empty()) s += "*";
      s += c;
    }
    return s.empty() ? "1" : s;
  }
};

namespace detail {

// Design row [1, T, terms...] written into x.
inline void fill_design_row(const TabularDataset& d,
                            const std::vector<AdjustmentTerm>& terms,
                            const std::vector<const std::vector<double>*>*
                                resolved,  // per term, per covariate
                            std::size_t i, double* x) {
  x[0] = 1.0;
  x[1] = d.treatment[i] == 1 ? 1.0 : 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    double v = terms[k].with_treatment ? x[1] : 1.0;
    for (const auto* col : resolved[k]) v *= (*col)[i];
    x[2 + k] = v;
  }
}

inline std::vector<std::vector<const std::vector<double>*>> resolve_terms(
    const TabularDataset& d, const std::vector<AdjustmentTerm>& terms) {
  std::vector<std::vector<const std::vector<double>*>> resolved(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    for (const auto& name : terms[k].covariates) {
      resolved[k].push_back(&d.covariate(name));
    }
  }
  return resolved;
}

}  // namespace detail

// Least squares of Y on [1, T, terms...], then the plug-in contrast
//   mean_i[ Yhat(do T=1, C_i) - Yhat(do T=0, C_i) ]
// over the empirical covariate distribution: the T coefficient plus, for
// every term carrying T, its coefficient times the mean of its covariate
// product. Faults on a rank-deficient design.
inline EstimateRecord parametric_backdoor(
    const TabularDataset& d, const std::vector<AdjustmentTerm>& terms) {
  require_both_arms(d, "parametric_backdoor");
  auto resolved = detail::resolve_terms(d, terms);
  const std::size_t k = 2 + terms.size();
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(k);
  std::vector<double> x(k);
  std::vector<double> term_mean(terms.size(), 0.0);
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    detail::fill_design_row(d, terms, resolved.data(), i, x.data());
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a; b < k; ++b) xtx(a, b) += x[a] * x[b];
      xty(a) += x[a] * d.outcome[i];
    }
    // Plug-in needs the covariate product without the treatment factor.
    for (std::size_t t = 0; t < terms.size(); ++t) {
      double v = 1.0;
      for (const auto* col : resolved[t]) v *= (*col)[i];
      term_mean[t] += v;
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < a; ++b) xtx(a, b) = xtx(b, a);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
  lu.setThreshold(1e-10);
  if (lu.rank() < static_cast<Eigen::Index>(k)) {
    throw Error("parametric_backdoor: design matrix is rank deficient (rank " +
                std::to_string(lu.rank()) + " of " + std::to_string(k) + ")");
  }
  Eigen::VectorXd beta = lu.solve(xty);
  double ate = beta(1);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (terms[t].with_treatment) {
      ate += beta(2 + t) * (term_mean[t] / static_cast<double>(d.n_rows));
    }
  }
  EstimateRecord r;
  r.estimator_name = "backdoor_param";
  r.point_estimate = ate;
  r.n_used = d.n_rows;
  std::string prov = "terms=[";
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (t) prov += ",";
    prov += terms[t].label();
  }
  r.provenance = prov + "]";
  return r;
}

}  // namespace rctbench

#endif  // RCTBENCH_ESTIMATORS_HPP
