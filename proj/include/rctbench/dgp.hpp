#ifndef RCTBENCH_DGP_HPP
#define RCTBENCH_DGP_HPP

#include <string>
#include <string_view>
#include <vector>

#include "rctbench/confounding.hpp"
#include "rctbench/dataset.hpp"
#include "rctbench/estimators.hpp"
#include "rctbench/rng.hpp"

namespace rctbench {

enum class DgpId { Setting1, Setting2, Setting3 };

inline DgpId parse_dgp_id(std::string_view s) {
  if (s == "setting1") return DgpId::Setting1;
  if (s == "setting2") return DgpId::Setting2;
  if (s == "setting3") return DgpId::Setting3;
  throw Error("unknown DGP setting: " + std::string(s) +
              " (expected setting1|setting2|setting3)");
}

inline std::string dgp_id_name(DgpId id) {
  switch (id) {
    case DgpId::Setting1: return "setting1";
    case DgpId::Setting2: return "setting2";
    case DgpId::Setting3: return "setting3";
  }
  throw Error("unknown DGP id");
}

struct DgpSetting {
  DgpId id = DgpId::Setting1;
  std::size_t n = 0;
  double true_ate = 0.0;
  std::vector<AdjustmentTerm> oracle_adjustment_terms;
};

// Adjustment terms the outcome regression actually needs, per setting.
inline std::vector<AdjustmentTerm> oracle_adjustment_terms(DgpId id) {
  if (id == DgpId::Setting3) {
    return {AdjustmentTerm{false, {"C4"}},
            AdjustmentTerm{true, {"C1", "C2"}},
            AdjustmentTerm{false, {"C2", "C3"}},
            AdjustmentTerm{false, {"C5"}}};
  }
  return {AdjustmentTerm{false, {"C"}}, AdjustmentTerm{true, {"C"}}};
}

inline DgpSetting dgp_setting(DgpId id, std::size_t n) {
  DgpSetting s;
  s.id = id;
  s.n = n;
  // Settings 1/2: 1.5 + 2*E[C] = 2.5. Setting 3: 2*E[C1*C2] - 1.5 with
  // E[C1*C2] = E[C1] + E[C1]*E[U] = 0.5 + 0.5*0.25 = 0.625, so -0.25.
  s.true_ate = (id == DgpId::Setting3) ? -0.25 : 2.5;
  s.oracle_adjustment_terms = oracle_adjustment_terms(id);
  return s;
}

// Draws one synthetic RCT. Column draw order is fixed (covariates in listed
// order, then treatment, then outcome noise), so a given (setting, seed)
// yields the same dataset everywhere.
//
// Setting 1: C ~ Bernoulli(0.5), T ~ Bernoulli(0.3),
//            Y = 0.5 C + 1.5 T + 2 T C + Normal(0,1).
// Setting 2: as Setting 1 with T ~ Bernoulli(0.5).
// Setting 3: C1 ~ Bernoulli(0.5), C2 = C1 + Uniform(-0.5, 1),
//            C3, C4 ~ Normal(0,1), C5 = C3 + C4 + Normal(0,1),
//            T ~ Bernoulli(0.3),
//            Y = 0.5 C4 + 2 T C1 C2 - 1.5 T + C2 C3 + C5 + Normal(0,1).
inline TabularDataset generate(const DgpSetting& setting, SeededRng& rng) {
  if (setting.n < 1) {
    throw Error("generate: row count must be at least 1");
  }
  const std::size_t n = setting.n;
  TabularDataset d;
  d.n_rows = n;
  if (setting.id == DgpId::Setting1 || setting.id == DgpId::Setting2) {
    double p_t = setting.id == DgpId::Setting1 ? 0.3 : 0.5;
    std::vector<double> c(n);
    for (auto& v : c) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    d.treatment.resize(n);
    for (auto& t : d.treatment) t = rng.bernoulli(p_t) ? 1 : 0;
    d.outcome.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double t = d.treatment[i];
      d.outcome[i] = 0.5 * c[i] + 1.5 * t + 2.0 * t * c[i] + rng.normal();
    }
    d.covariate_names = {"C"};
    d.covariates.push_back(std::move(c));
    return d;
  }
  std::vector<double> c1(n), c2(n), c3(n), c4(n), c5(n);
  for (auto& v : c1) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
  for (std::size_t i = 0; i < n; ++i) c2[i] = c1[i] + rng.uniform(-0.5, 1.0);
  for (auto& v : c3) v = rng.normal();
  for (auto& v : c4) v = rng.normal();
  for (std::size_t i = 0; i < n; ++i) c5[i] = c3[i] + c4[i] + rng.normal();
  d.treatment.resize(n);
  for (auto& t : d.treatment) t = rng.bernoulli(0.3) ? 1 : 0;
  d.outcome.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = d.treatment[i];
    d.outcome[i] = 0.5 * c4[i] + 2.0 * t * c1[i] * c2[i] - 1.5 * t +
                   c2[i] * c3[i] + c5[i] + rng.normal();
  }
  d.covariate_names = {"C1", "C2", "C3", "C4", "C5"};
  d.covariates.push_back(std::move(c1));
  d.covariates.push_back(std::move(c2));
  d.covariates.push_back(std::move(c3));
  d.covariates.push_back(std::move(c4));
  d.covariates.push_back(std::move(c5));
  return d;
}

// The confounding function each setting was designed around.
// Settings 1/2: expit(-1 + 2.5 C). Setting 3: expit(0.5 C1 - 0.7 C2
// + 1.2 C3 + 1.5 C4 - 1.2 C5 + 0.5 C1 C2).
inline ConfoundingFunction dgp_confounding_function(DgpId id) {
  if (id == DgpId::Setting3) {
    return ConfoundingFunction::logistic(
        0.0, {LogisticTerm{{"C1"}, 0.5}, LogisticTerm{{"C2"}, -0.7},
              LogisticTerm{{"C3"}, 1.2}, LogisticTerm{{"C4"}, 1.5},
              LogisticTerm{{"C5"}, -1.2}, LogisticTerm{{"C1", "C2"}, 0.5}});
  }
  return ConfoundingFunction::logistic(-1.0, {LogisticTerm{{"C"}, 2.5}});
}

}  // namespace rctbench

#endif  // RCTBENCH_DGP_HPP
