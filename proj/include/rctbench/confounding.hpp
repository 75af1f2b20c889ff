#ifndef RCTBENCH_CONFOUNDING_HPP
#define RCTBENCH_CONFOUNDING_HPP

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "rctbench/dataset.hpp"

namespace rctbench {

inline double expit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// One additive term of a logistic confounding function: coef times the
// product of the named covariates (an empty product never occurs; use the
// intercept instead).
struct LogisticTerm {
  std::vector<std::string> covariates;
  double coef = 0.0;
};

// Designer-specified P*(T=1 | C). Two parameterizations:
//   PiecewiseBinary: zeta0 / zeta1 keyed on one 0/1 covariate,
//   Logistic: expit(intercept + sum of coef * covariate products).
// Positivity (values strictly inside (0,1)) is enforced at construction for
// the piecewise form and at evaluation for the logistic form. A function
// that does not actually depend on C must be marked trivial explicitly.
struct ConfoundingFunction {
  enum class Kind { PiecewiseBinary, Logistic };

  Kind kind = Kind::PiecewiseBinary;
  // PiecewiseBinary
  std::string covariate;
  double zeta0 = 0.5;
  double zeta1 = 0.5;
  // Logistic
  double intercept = 0.0;
  std::vector<LogisticTerm> terms;

  bool marked_trivial = false;

  bool is_trivial() const {
    if (kind == Kind::PiecewiseBinary) return zeta0 == zeta1;
    for (const auto& t : terms) {
      if (t.coef != 0.0) return false;
    }
    return true;
  }

  static ConfoundingFunction piecewise(std::string covariate, double zeta0,
                                       double zeta1,
                                       bool allow_trivial = false) {
    if (!(zeta0 > 0.0 && zeta0 < 1.0) || !(zeta1 > 0.0 && zeta1 < 1.0)) {
      throw Error("piecewise confounding function violates positivity: "
                  "zeta0 and zeta1 must lie strictly in (0,1)");
    }
    ConfoundingFunction f;
    f.kind = Kind::PiecewiseBinary;
    f.covariate = std::move(covariate);
    f.zeta0 = zeta0;
    f.zeta1 = zeta1;
    f.marked_trivial = allow_trivial;
    if (f.is_trivial() && !allow_trivial) {
      throw Error("confounding function is constant in C; pass "
                  "allow_trivial to build it anyway");
    }
    return f;
  }

  static ConfoundingFunction logistic(double intercept,
                                      std::vector<LogisticTerm> terms,
                                      bool allow_trivial = false) {
    ConfoundingFunction f;
    f.kind = Kind::Logistic;
    f.intercept = intercept;
    f.terms = std::move(terms);
    f.marked_trivial = allow_trivial;
    if (f.is_trivial() && !allow_trivial) {
      throw Error("confounding function is constant in C; pass "
                  "allow_trivial to build it anyway");
    }
    return f;
  }

  std::string describe() const {
    if (kind == Kind::PiecewiseBinary) {
      return "piecewise(" + covariate + "; zeta0=" + std::to_string(zeta0) +
             ", zeta1=" + std::to_string(zeta1) + ")";
    }
    std::string s = "logistic(" + std::to_string(intercept);
    for (const auto& t : terms) {
      s += " + " + std::to_string(t.coef) + "*";
      for (std::size_t k = 0; k < t.covariates.size(); ++k) {
        if (k) s += "*";
        s += t.covariates[k];
      }
    }
    return s + ")";
  }
};

// P*(T=1 | C = row i of d). Faults on missing covariates and on results
// outside (0,1).
inline double evaluate_pstar(const ConfoundingFunction& f,
                             const TabularDataset& d, std::size_t row) {
  double p;
  if (f.kind == ConfoundingFunction::Kind::PiecewiseBinary) {
    const auto& col = d.covariate(f.covariate);
    double c = col[row];
    if (c != 0.0 && c != 1.0) {
      throw Error("piecewise confounding function needs a binary covariate; " +
                  f.covariate + " has value " + std::to_string(c));
    }
    p = (c == 0.0) ? f.zeta0 : f.zeta1;
  } else {
    double z = f.intercept;
    for (const auto& t : f.terms) {
      double prod = t.coef;
      for (const auto& name : t.covariates) {
        prod *= d.covariate(name)[row];
      }
      z += prod;
    }
    p = expit(z);
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw Error("confounding function violated positivity at row " +
                std::to_string(row) + ": P*(T=1|C)=" + std::to_string(p));
  }
  return p;
}

inline std::vector<double> evaluate_pstar_all(const ConfoundingFunction& f,
                                              const TabularDataset& d) {
  std::vector<double> out(d.n_rows);
  for (std::size_t i = 0; i < d.n_rows; ++i) out[i] = evaluate_pstar(f, d, i);
  return out;
}

}  // namespace rctbench

#endif  // RCTBENCH_CONFOUNDING_HPP
