#ifndef RCTBENCH_DIAGNOSTICS_HPP
#define RCTBENCH_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rctbench/confounding.hpp"
#include "rctbench/dataset.hpp"
#include "rctbench/dgp.hpp"
#include "rctbench/estimators.hpp"
#include "rctbench/rng.hpp"
#include "rctbench/sampler.hpp"

namespace rctbench {

struct OddsRatioResult {
  double value = 1.0;
  // Haldane-Anscombe +0.5 applied to every cell because one was empty.
  bool continuity_corrected = false;
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;

  // Asymptotic (Woolf) standard error of log(OR) on the corrected counts.
  double log_se() const {
    return std::sqrt(1.0 / n11 + 1.0 / n10 + 1.0 / n01 + 1.0 / n00);
  }
};

inline OddsRatioResult odds_ratio_from_counts(double n11, double n10,
                                              double n01, double n00) {
  OddsRatioResult r;
  if (n11 == 0 || n10 == 0 || n01 == 0 || n00 == 0) {
    r.continuity_corrected = true;
    n11 += 0.5;
    n10 += 0.5;
    n01 += 0.5;
    n00 += 0.5;
  }
  r.n11 = n11;
  r.n10 = n10;
  r.n01 = n01;
  r.n00 = n00;
  r.value = (n11 * n00) / (n10 * n01);
  return r;
}

// (n11 n00) / (n10 n01) for two binary vectors.
template <typename A, typename B>
OddsRatioResult odds_ratio(const A& a, const B& b) {
  if (a.size() != b.size()) {
    throw Error("odds_ratio: vectors have different lengths");
  }
  double n[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < a.size(); ++i) {
    double av = static_cast<double>(a[i]);
    double bv = static_cast<double>(b[i]);
    if ((av != 0.0 && av != 1.0) || (bv != 0.0 && bv != 1.0)) {
      throw Error("odds_ratio: inputs must be binary 0/1");
    }
    n[av == 1.0][bv == 1.0] += 1.0;
  }
  return odds_ratio_from_counts(n[1][1], n[1][0], n[0][1], n[0][0]);
}

inline bool is_binary_column(const std::vector<double>& col) {
  for (double v : col) {
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

// Checks that at least one covariate is associated with the outcome, the
// precondition for inducing recoverable confounding by subsampling. Binary
// covariate with binary outcome: odds ratio, passing when |log OR| exceeds
// three Woolf standard errors. Otherwise: Pearson correlation, passing when
// |r| > 3 / sqrt(n).
struct PreconditionReport {
  struct PerCovariate {
    std::string name;
    std::string measure;  // "odds_ratio" or "correlation"
    double association = 0.0;
    bool pass = false;
  };
  std::vector<PerCovariate> covariates;
  bool pass = false;
};

inline double pearson_correlation(std::span<const double> a,
                                  std::span<const double> b) {
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

inline PreconditionReport check_precondition(const TabularDataset& d) {
  require_valid(d);
  PreconditionReport rep;
  bool y_binary = is_binary_column(d.outcome);
  for (std::size_t j = 0; j < d.covariates.size(); ++j) {
    PreconditionReport::PerCovariate pc;
    pc.name = d.covariate_names[j];
    if (y_binary && is_binary_column(d.covariates[j])) {
      auto orr = odds_ratio(d.covariates[j], d.outcome);
      pc.measure = "odds_ratio";
      pc.association = orr.value;
      pc.pass = std::fabs(std::log(orr.value)) > 3.0 * orr.log_se();
    } else {
      pc.measure = "correlation";
      pc.association = pearson_correlation(d.covariates[j], d.outcome);
      pc.pass = std::fabs(pc.association) >
                3.0 / std::sqrt(static_cast<double>(d.n_rows));
    }
    rep.covariates.push_back(pc);
  }
  for (const auto& pc : rep.covariates) rep.pass = rep.pass || pc.pass;
  return rep;
}

// Per-level treated fraction of a discrete covariate; passes iff strictly
// inside (0,1) at every level.
struct OverlapReport {
  struct Level {
    double value = 0.0;
    std::size_t n = 0;
    double treated_fraction = 0.0;
    bool pass = false;
  };
  std::string covariate;
  std::vector<Level> levels;
  bool pass = true;
};

inline OverlapReport check_overlap(const TabularDataset& d,
                                   std::string_view covariate) {
  const auto& col = d.covariate(covariate);
  std::map<double, std::pair<std::size_t, std::size_t>> counts;  // n, treated
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    auto& c = counts[col[i]];
    c.first += 1;
    c.second += (d.treatment[i] == 1);
  }
  OverlapReport rep;
  rep.covariate = std::string(covariate);
  for (const auto& [value, c] : counts) {
    OverlapReport::Level lv;
    lv.value = value;
    lv.n = c.first;
    lv.treated_fraction =
        static_cast<double>(c.second) / static_cast<double>(c.first);
    lv.pass = lv.treated_fraction > 0.0 && lv.treated_fraction < 1.0;
    rep.pass = rep.pass && lv.pass;
    rep.levels.push_back(lv);
  }
  return rep;
}

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  int n_redraws = 0;  // resamples redrawn because the estimator faulted
};

inline double percentile(std::vector<double>& sorted_values, double p) {
  // Linear interpolation between order statistics.
  const std::size_t n = sorted_values.size();
  if (n == 1) return sorted_values[0];
  double h = p * static_cast<double>(n - 1);
  std::size_t lo = static_cast<std::size_t>(h);
  if (lo >= n - 1) return sorted_values[n - 1];
  double frac = h - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

using DatasetEstimator = std::function<double(const TabularDataset&)>;
using IndexEstimator = std::function<double(std::span<const std::size_t>)>;

// Resampling core shared by the dataset-level bootstrap and the benchmark
// runner's preextracted fast path: both draw the same index streams and so
// produce identical intervals for the same estimator.
inline ConfidenceInterval bootstrap_ci_indices(std::size_t n_rows,
                                               const IndexEstimator& estimate,
                                               int n_boot, double level,
                                               SeededRng& rng) {
  if (n_boot < 1) throw Error("bootstrap_ci: n_boot must be >= 1");
  if (!(level > 0.0 && level < 1.0)) {
    throw Error("bootstrap_ci: level must be in (0,1)");
  }
  if (n_rows == 0) throw Error("bootstrap_ci: empty dataset");
  std::vector<double> estimates;
  estimates.reserve(n_boot);
  std::vector<std::size_t> idx(n_rows);
  ConfidenceInterval ci;
  const long max_attempts = 10L * n_boot;
  long attempts = 0;
  while (estimates.size() < static_cast<std::size_t>(n_boot)) {
    if (attempts >= max_attempts) {
      throw Error("bootstrap_ci: estimator failed on too many resamples (" +
                  std::to_string(ci.n_redraws) + " of " +
                  std::to_string(attempts) + " attempts)");
    }
    SeededRng draw = rng.substream(static_cast<std::uint64_t>(attempts));
    ++attempts;
    for (auto& v : idx) v = draw.uniform_index(n_rows);
    try {
      estimates.push_back(estimate(idx));
    } catch (const Error&) {
      ++ci.n_redraws;
    }
  }
  std::sort(estimates.begin(), estimates.end());
  double alpha = 1.0 - level;
  ci.lo = percentile(estimates, alpha / 2.0);
  ci.hi = percentile(estimates, 1.0 - alpha / 2.0);
  return ci;
}

// Percentile bootstrap: rows are resampled with replacement n_boot times and
// the estimator re-run; the interval is the (alpha/2, 1-alpha/2) quantiles.
// A resample on which the estimator faults is redrawn (total attempts capped
// at 10 * n_boot); the redraw count is reported.
inline ConfidenceInterval bootstrap_ci(const TabularDataset& d,
                                       const DatasetEstimator& estimator,
                                       int n_boot, double level,
                                       SeededRng& rng) {
  TabularDataset buffer;
  return bootstrap_ci_indices(
      d.n_rows,
      [&](std::span<const std::size_t> idx) {
        gather_rows(d, idx, buffer);
        return estimator(buffer);
      },
      n_boot, level, rng);
}

struct CoverageReport {
  std::size_t n_seeds = 0;
  std::size_t n_covered = 0;
  double coverage = 0.0;
  double ci_level = 0.95;
};

inline CoverageReport coverage(
    std::span<const std::pair<double, double>> intervals, double truth,
    double ci_level = 0.95) {
  if (intervals.empty()) throw Error("coverage: need at least one interval");
  CoverageReport rep;
  rep.n_seeds = intervals.size();
  rep.ci_level = ci_level;
  for (const auto& [lo, hi] : intervals) {
    if (lo <= truth && truth <= hi) ++rep.n_covered;
  }
  rep.coverage =
      static_cast<double>(rep.n_covered) / static_cast<double>(rep.n_seeds);
  return rep;
}

// One subsample draw scored against the RCT ground truth: how much
// confounding the draw shows to a naive estimator (x axis) versus how much
// error remains after oracle adjustment (y axis). Useful draws fall below
// the y = x line.
struct DiagnosticPoint {
  std::uint64_t seed_index = 0;
  double naive_gap = 0.0;
  double oracle_gap = 0.0;
  bool below_line = false;
  bool failed = false;
  std::string error;
};

struct DiagnosticSweepResult {
  ConfoundingFunction f;
  std::vector<DiagnosticPoint> points;
  double fraction_below = 0.0;
  std::size_t n_failed = 0;
};

// For each f and seed: subsample the RCT with the rejection sampler and
// record |GoldATE - naive| vs |GoldATE - oracle| where GoldATE is the
// difference in means on this specific RCT. Sampler faults are recorded per
// seed, not fatal.
inline std::vector<DiagnosticSweepResult> diagnostic_sweep(
    const TabularDataset& rct, std::span<const ConfoundingFunction> f_grid,
    int n_seeds, const DatasetEstimator& oracle_estimator,
    const SeededRng& master) {
  require_valid(rct);
  double gold = diff_in_means(rct).point_estimate;
  std::vector<DiagnosticSweepResult> results;
  for (std::size_t fi = 0; fi < f_grid.size(); ++fi) {
    DiagnosticSweepResult res;
    res.f = f_grid[fi];
    std::size_t below = 0, ok = 0;
    for (int s = 0; s < n_seeds; ++s) {
      DiagnosticPoint pt;
      pt.seed_index = static_cast<std::uint64_t>(s);
      SeededRng rng = master.substream(
          derive_seed(fi, static_cast<std::uint64_t>(s)));
      try {
        auto rep = rct_rejection_sample(rct, f_grid[fi], rng);
        pt.naive_gap =
            std::fabs(gold - diff_in_means(rep.output).point_estimate);
        pt.oracle_gap = std::fabs(gold - oracle_estimator(rep.output));
        pt.below_line = pt.oracle_gap < pt.naive_gap;
        below += pt.below_line;
        ++ok;
      } catch (const Error& e) {
        pt.failed = true;
        pt.error = e.what();
        ++res.n_failed;
      }
      res.points.push_back(std::move(pt));
    }
    res.fraction_below =
        ok == 0 ? 0.0 : static_cast<double>(below) / static_cast<double>(ok);
    results.push_back(std::move(res));
  }
  return results;
}

struct StrengthSweepRow {
  double strength = 0.0;
  std::size_t n_seeds = 0;
  double mean_estimate = 0.0;
  double std_estimate = 0.0;
  double mean_gold = 0.0;
  double mean_abs_bias = 0.0;
};

// Varies the confounding strength x in P*(T=1|C) = expit(-1 + x C) for the
// single-binary-covariate settings, resampling and re-estimating with the
// oracle adjustment at each strength. Strengths must keep P* within
// (0.05, 0.95) on both covariate levels so overlap holds.
inline std::vector<StrengthSweepRow> confounding_strength_sweep(
    DgpId setting, std::span<const double> strengths, int n_seeds,
    std::size_t n, const SeededRng& master) {
  if (setting == DgpId::Setting3) {
    throw Error("confounding_strength_sweep: defined for the single-covariate "
                "settings only");
  }
  for (double x : strengths) {
    for (double c : {0.0, 1.0}) {
      double p = expit(-1.0 + x * c);
      if (!(p > 0.05 && p < 0.95)) {
        throw Error("confounding_strength_sweep: strength " +
                    std::to_string(x) + " pushes P*(T=1|C=" +
                    std::to_string(int(c)) + ") to " + std::to_string(p) +
                    ", outside (0.05, 0.95)");
      }
    }
  }
  auto spec = dgp_setting(setting, n);
  std::vector<StrengthSweepRow> rows;
  for (std::size_t xi = 0; xi < strengths.size(); ++xi) {
    double x = strengths[xi];
    ConfoundingFunction f =
        x == 0.0 ? ConfoundingFunction::logistic(
                       -1.0, {LogisticTerm{{"C"}, 0.0}}, true)
                 : ConfoundingFunction::logistic(-1.0,
                                                 {LogisticTerm{{"C"}, x}});
    StrengthSweepRow row;
    row.strength = x;
    std::vector<double> ests, golds;
    for (int s = 0; s < n_seeds; ++s) {
      SeededRng gen_rng = master.substream(
          derive_seed(hash_label("strength_gen"),
                      static_cast<std::uint64_t>(s)));
      auto rct = generate(spec, gen_rng);
      SeededRng samp_rng = master.substream(derive_seed(
          derive_seed(hash_label("strength_sample"), xi),
          static_cast<std::uint64_t>(s)));
      auto rep = rct_rejection_sample(rct, f, samp_rng);
      double est =
          parametric_backdoor(rep.output, spec.oracle_adjustment_terms)
              .point_estimate;
      ests.push_back(est);
      golds.push_back(diff_in_means(rct).point_estimate);
    }
    double me = 0, mg = 0, mab = 0;
    for (std::size_t i = 0; i < ests.size(); ++i) {
      me += ests[i];
      mg += golds[i];
      mab += std::fabs(ests[i] - golds[i]);
    }
    me /= ests.size();
    mg /= ests.size();
    mab /= ests.size();
    double var = 0;
    for (double e : ests) var += (e - me) * (e - me);
    row.n_seeds = ests.size();
    row.mean_estimate = me;
    row.std_estimate = std::sqrt(var / ests.size());
    row.mean_gold = mg;
    row.mean_abs_bias = mab;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rctbench

#endif  // RCTBENCH_DIAGNOSTICS_HPP
