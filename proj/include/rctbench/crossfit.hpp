#ifndef RCTBENCH_CROSSFIT_HPP
#define RCTBENCH_CROSSFIT_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rctbench/dataset.hpp"
#include "rctbench/estimators.hpp"
#include "rctbench/learners.hpp"
#include "rctbench/rng.hpp"

namespace rctbench {

// Held-out nuisance predictions, one per row:
//   q0 = E[Y | T=0, X], q1 = E[Y | T=1, X], g = P(T=1 | X), qx = E[Y | X].
// Every prediction comes from a model whose training folds exclude the row.
// Probabilities are clipped into [epsilon, 1 - epsilon]. Outcome models are
// classifiers, so q0/q1/qx are only fit for binary outcomes
// (has_outcome_models); g is always fit.
struct NuisanceEstimates {
  std::vector<double> q0, q1, g, qx;
  std::vector<int> fold_id;
  double clip_epsilon = 0.01;
  bool has_outcome_models = false;
  std::string provenance;
  // Average precision per model, averaged over folds, on the training and
  // held-out splits. Keys: g, q0, q1, qx.
  std::map<std::string, double> train_ap, inference_ap;
};

// Average precision for a binary ranking, ties grouped (equal scores are one
// threshold step).
inline double average_precision(std::span<const double> labels,
                                std::span<const double> scores) {
  if (labels.size() != scores.size()) {
    throw Error("average_precision: length mismatch");
  }
  double total_pos = 0.0;
  for (double v : labels) total_pos += (v == 1.0);
  if (total_pos == 0.0) return 0.0;
  std::vector<std::size_t> order(labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return scores[a] > scores[b];
  });
  double tp = 0.0, seen = 0.0, ap = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double tp_here = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      tp_here += (labels[order[j]] == 1.0);
      ++j;
    }
    tp += tp_here;
    seen += static_cast<double>(j - i);
    if (tp_here > 0.0) {
      ap += (tp / seen) * (tp_here / total_pos);
    }
    i = j;
  }
  return ap;
}

namespace detail {

inline std::vector<double> gather(std::span<const double> v,
                                  std::span<const std::uint32_t> idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

}  // namespace detail

// K-fold cross-fitting of the four nuisance models. For each fold j, g and
// qx are fit on all rows outside j; q0 / q1 are T-learners fit on the
// untreated / treated rows outside j. Predictions are made on fold j only.
inline NuisanceEstimates crossfit_nuisances(const TabularDataset& d,
                                            const BaseLearnerSpec& spec,
                                            int k_folds, SeededRng& rng) {
  if (k_folds < 2) throw Error("crossfit_nuisances: k_folds must be >= 2");
  if (d.n_rows < static_cast<std::size_t>(k_folds)) {
    throw Error("crossfit_nuisances: fewer rows than folds");
  }
  require_both_arms(d, "crossfit_nuisances");

  FeatureMatrix fm = FeatureMatrix::from_dataset(d);
  std::vector<double> t_labels(d.n_rows), y(d.n_rows);
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    t_labels[i] = d.treatment[i] == 1 ? 1.0 : 0.0;
    y[i] = d.outcome[i];
  }
  bool binary_y = true;
  for (double v : y) binary_y = binary_y && (v == 0.0 || v == 1.0);

  // Shuffled round-robin fold assignment.
  std::vector<std::size_t> perm(d.n_rows);
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  rng.shuffle(perm);
  NuisanceEstimates nuis;
  nuis.fold_id.assign(d.n_rows, 0);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    nuis.fold_id[perm[i]] = static_cast<int>(i % k_folds);
  }
  nuis.has_outcome_models = binary_y;
  nuis.g.assign(d.n_rows, 0.0);
  if (binary_y) {
    nuis.q0.assign(d.n_rows, 0.0);
    nuis.q1.assign(d.n_rows, 0.0);
    nuis.qx.assign(d.n_rows, 0.0);
  }

  const double eps = nuis.clip_epsilon;
  auto clip = [eps](double p) { return std::clamp(p, eps, 1.0 - eps); };

  struct ApAcc {
    double train = 0.0, infer = 0.0;
    int n = 0;
  };
  std::map<std::string, ApAcc> ap;

  for (int f = 0; f < k_folds; ++f) {
    std::vector<std::uint32_t> train, infer, train0, train1;
    for (std::size_t i = 0; i < d.n_rows; ++i) {
      if (nuis.fold_id[i] == f) {
        infer.push_back(static_cast<std::uint32_t>(i));
      } else {
        train.push_back(static_cast<std::uint32_t>(i));
        (d.treatment[i] == 1 ? train1 : train0)
            .push_back(static_cast<std::uint32_t>(i));
      }
    }
    if (train0.empty() || train1.empty()) {
      throw Error("crossfit_nuisances: training complement of fold " +
                  std::to_string(f) +
                  " is missing a treatment arm; try fewer folds");
    }

    FeatureMatrix f_infer = fm.subset(infer);

    auto fit_and_fill = [&](const char* name,
                            const std::vector<std::uint32_t>& rows,
                            std::span<const double> labels,
                            std::vector<double>& dest) {
      FeatureMatrix ftr = fm.subset(rows);
      auto ltr = detail::gather(labels, rows);
      SeededRng fit_rng = rng.substream(
          derive_seed(hash_label(name), static_cast<std::uint64_t>(f)));
      auto model = fit_base_learner(spec, ftr, ltr, fit_rng);
      auto p_train = model->predict_proba(ftr);
      auto p_infer = model->predict_proba(f_infer);
      for (std::size_t i = 0; i < infer.size(); ++i) {
        dest[infer[i]] = clip(p_infer[i]);
      }
      auto linf = detail::gather(labels, infer);
      auto& acc = ap[name];
      acc.train += average_precision(ltr, p_train);
      acc.infer += average_precision(linf, p_infer);
      acc.n += 1;
    };

    fit_and_fill("g", train, t_labels, nuis.g);
    if (binary_y) {
      fit_and_fill("q0", train0, y, nuis.q0);
      fit_and_fill("q1", train1, y, nuis.q1);
      fit_and_fill("qx", train, y, nuis.qx);
    }
  }

  for (auto& [name, acc] : ap) {
    nuis.train_ap[name] = acc.train / acc.n;
    nuis.inference_ap[name] = acc.infer / acc.n;
  }
  nuis.provenance = spec.provenance() + ",k_folds=" + std::to_string(k_folds) +
                    ",clip=" + std::to_string(eps);
  return nuis;
}

namespace detail {

inline void require_nuisance_arity(const TabularDataset& d,
                                   std::span<const double> v,
                                   const char* what) {
  if (v.size() != d.n_rows) {
    throw Error(std::string(what) +
                " predictions missing or misaligned with dataset");
  }
}

inline void require_clipped_g(std::span<const double> g) {
  for (double v : g) {
    if (!(v > 0.0 && v < 1.0)) {
      throw Error("propensity predictions must be clipped strictly inside "
                  "(0,1); found " + std::to_string(v));
    }
  }
}

}  // namespace detail

// Outcome-regression plug-in: mean(q1 - q0).
inline EstimateRecord tau_q(const TabularDataset& d,
                            const NuisanceEstimates& nuis) {
  detail::require_nuisance_arity(d, nuis.q0, "q0");
  detail::require_nuisance_arity(d, nuis.q1, "q1");
  double s = 0.0;
  for (std::size_t i = 0; i < d.n_rows; ++i) s += nuis.q1[i] - nuis.q0[i];
  EstimateRecord r;
  r.estimator_name = "q";
  r.point_estimate = s / static_cast<double>(d.n_rows);
  r.n_used = d.n_rows;
  r.provenance = nuis.provenance;
  return r;
}

// Inverse propensity weighting: mean(y t / g - y (1-t) / (1-g)).
inline EstimateRecord tau_iptw(const TabularDataset& d,
                               const NuisanceEstimates& nuis) {
  detail::require_nuisance_arity(d, nuis.g, "g");
  detail::require_clipped_g(nuis.g);
  double s = 0.0;
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    double t = d.treatment[i] == 1 ? 1.0 : 0.0;
    s += d.outcome[i] * t / nuis.g[i] -
         d.outcome[i] * (1.0 - t) / (1.0 - nuis.g[i]);
  }
  EstimateRecord r;
  r.estimator_name = "iptw";
  r.point_estimate = s / static_cast<double>(d.n_rows);
  r.n_used = d.n_rows;
  r.provenance = nuis.provenance;
  return r;
}

// Doubly robust augmented IPW:
//   mean( q1 - q0 + t (y - q1) / g - (1-t) (y - q0) / (1-g) ).
inline EstimateRecord tau_aiptw(const TabularDataset& d,
                                const NuisanceEstimates& nuis) {
  detail::require_nuisance_arity(d, nuis.q0, "q0");
  detail::require_nuisance_arity(d, nuis.q1, "q1");
  detail::require_nuisance_arity(d, nuis.g, "g");
  detail::require_clipped_g(nuis.g);
  double s = 0.0;
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    double t = d.treatment[i] == 1 ? 1.0 : 0.0;
    double y = d.outcome[i];
    s += nuis.q1[i] - nuis.q0[i] + t * (y - nuis.q1[i]) / nuis.g[i] -
         (1.0 - t) * (y - nuis.q0[i]) / (1.0 - nuis.g[i]);
  }
  EstimateRecord r;
  r.estimator_name = "aiptw";
  r.point_estimate = s / static_cast<double>(d.n_rows);
  r.n_used = d.n_rows;
  r.provenance = nuis.provenance;
  return r;
}

// Partialling-out slope: no-intercept least squares of the outcome residual
// (y - qx) on the treatment residual (t - g),
//   sum (t-g)(y-qx) / sum (t-g)^2.
inline EstimateRecord tau_dml(const TabularDataset& d,
                              const NuisanceEstimates& nuis) {
  detail::require_nuisance_arity(d, nuis.g, "g");
  detail::require_nuisance_arity(d, nuis.qx, "qx");
  detail::require_clipped_g(nuis.g);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    double rt = (d.treatment[i] == 1 ? 1.0 : 0.0) - nuis.g[i];
    double ry = d.outcome[i] - nuis.qx[i];
    num += rt * ry;
    den += rt * rt;
  }
  if (den <= 0.0) {
    throw Error("tau_dml: treatment residuals have zero variance");
  }
  EstimateRecord r;
  r.estimator_name = "dml";
  r.point_estimate = num / den;
  r.n_used = d.n_rows;
  r.provenance = nuis.provenance;
  return r;
}

}  // namespace rctbench

#endif  // RCTBENCH_CROSSFIT_HPP
