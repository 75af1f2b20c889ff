#ifndef RCTBENCH_BENCH_HPP
#define RCTBENCH_BENCH_HPP

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "rctbench/config.hpp"
#include "rctbench/crossfit.hpp"
#include "rctbench/csv.hpp"
#include "rctbench/diagnostics.hpp"
#include "rctbench/dgp.hpp"
#include "rctbench/estimators.hpp"
#include "rctbench/sampler.hpp"
#include "rctbench/text.hpp"

namespace rctbench {

// Raised when more than 10% of seeds fault in any benchmark cell.
class SeedFailureError : public Error {
 public:
  explicit SeedFailureError(const std::string& what) : Error(what) {}
};

inline void parallel_for(std::size_t n_tasks, int n_workers,
                         const std::function<void(std::size_t)>& fn) {
  if (n_workers <= 0) {
    n_workers = static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers <= 0) n_workers = 1;
  }
  if (n_workers == 1 || n_tasks <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= n_tasks) break;
        fn(i);  // tasks handle their own faults
      }
    });
  }
  for (auto& t : pool) t.join();
}

namespace detail {

// Re-estimates a cheap estimator on bootstrap resamples without
// materializing the resampled dataset: the index stream is turned into row
// multiplicities (one sequential byte pass), then a single weighted sweep of
// per-row precomputed data accumulates the sufficient statistics. Same
// resamples, same fault conditions and same estimates (up to last-ulp
// summation-order effects) as running the dataset-level estimator on the
// gathered rows, at a fraction of the memory traffic. estimate_stream is
// not re-entrant (scratch buffers), matching the one-kernel-per-task use.
class BootstrapKernel {
 public:
  virtual ~BootstrapKernel() = default;
  virtual double estimate_stream(SeededRng& draw) const = 0;

 protected:
  explicit BootstrapKernel(std::size_t n_rows)
      : n_rows_(n_rows), multiplicity_(n_rows) {}

  // Draws n_rows row indices and tallies multiplicities.
  void draw_multiplicities(SeededRng& draw) const {
    std::fill(multiplicity_.begin(), multiplicity_.end(), 0);
    for (std::size_t i = 0; i < n_rows_; ++i) {
      ++multiplicity_[draw.uniform_index(n_rows_)];
    }
  }

  std::size_t n_rows_;
  mutable std::vector<std::uint8_t> multiplicity_;
};

class DimKernel : public BootstrapKernel {
 public:
  explicit DimKernel(const TabularDataset& d) : BootstrapKernel(d.n_rows) {
    rows_.resize(d.n_rows);
    for (std::size_t i = 0; i < d.n_rows; ++i) {
      rows_[i] = {d.outcome[i], d.treatment[i] == 1};
    }
  }

  double estimate_stream(SeededRng& draw) const override {
    draw_multiplicities(draw);
    double s1 = 0.0, s0 = 0.0;
    std::size_t n1 = 0, n0 = 0;
    for (std::size_t i = 0; i < n_rows_; ++i) {
      double m = multiplicity_[i];
      if (m == 0.0) continue;
      if (rows_[i].treated) {
        s1 += m * rows_[i].y;
        n1 += multiplicity_[i];
      } else {
        s0 += m * rows_[i].y;
        n0 += multiplicity_[i];
      }
    }
    if (n1 == 0 || n0 == 0) throw Error("dim: resample lost an arm");
    return s1 / static_cast<double>(n1) - s0 / static_cast<double>(n0);
  }

 private:
  struct Row {
    double y;
    bool treated;
  };
  std::vector<Row> rows_;
};

class ExactBackdoorKernel : public BootstrapKernel {
 public:
  ExactBackdoorKernel(const TabularDataset& d, const std::string& covariate)
      : BootstrapKernel(d.n_rows) {
    const auto& col = d.covariate(covariate);
    rows_.resize(d.n_rows);
    for (std::size_t i = 0; i < d.n_rows; ++i) {
      if (col[i] != 0.0 && col[i] != 1.0) {
        throw Error("exact_backdoor_binary: covariate " + covariate +
                    " is not binary at row " + std::to_string(i));
      }
      rows_[i] = {d.outcome[i],
                  static_cast<std::uint8_t>((d.treatment[i] == 1 ? 2 : 0) +
                                            (col[i] == 1.0 ? 1 : 0))};
    }
  }

  double estimate_stream(SeededRng& draw) const override {
    draw_multiplicities(draw);
    double count[4] = {0, 0, 0, 0};  // cell = 2 t + c
    double ysum[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < n_rows_; ++i) {
      double m = multiplicity_[i];
      if (m == 0.0) continue;
      count[rows_[i].cell] += m;
      ysum[rows_[i].cell] += m * rows_[i].y;
    }
    for (int cell = 0; cell < 4; ++cell) {
      if (count[cell] == 0.0) throw Error("backdoor_exact: empty cell");
    }
    double n = static_cast<double>(n_rows_);
    double ate = 0.0;
    for (int c = 0; c < 2; ++c) {
      double pc = (count[c] + count[2 + c]) / n;
      ate += pc * (ysum[2 + c] / count[2 + c] - ysum[c] / count[c]);
    }
    return ate;
  }

 private:
  struct Row {
    double y;
    std::uint8_t cell;
  };
  std::vector<Row> rows_;
};

class ParamBackdoorKernel : public BootstrapKernel {
 public:
  ParamBackdoorKernel(const TabularDataset& d,
                      const std::vector<AdjustmentTerm>& terms)
      : BootstrapKernel(d.n_rows), k_(2 + terms.size()),
        n_terms_(terms.size()) {
    // Saturated special case: terms [X, T*X] on one binary covariate make
    // the regression an exact 2x2 cell-mean fit, so the plug-in contrast
    // reduces to the stratified backdoor formula.
    if (terms.size() == 2 && !terms[0].with_treatment &&
        terms[1].with_treatment && terms[0].covariates.size() == 1 &&
        terms[1].covariates == terms[0].covariates &&
        is_binary_column(d.covariate(terms[0].covariates[0]))) {
      saturated_.emplace(d, terms[0].covariates[0]);
      return;
    }
    auto resolved = rctbench::detail::resolve_terms(d, terms);
    // Only terms carrying T feed the plug-in contrast; others need no
    // product column.
    for (std::size_t j = 0; j < n_terms_; ++j) {
      if (terms[j].with_treatment) t_term_.push_back(j);
    }
    stride_ = 1 + k_ + t_term_.size();
    rows_.resize(d.n_rows * stride_);
    for (std::size_t i = 0; i < d.n_rows; ++i) {
      double* row = rows_.data() + i * stride_;
      row[0] = d.outcome[i];
      rctbench::detail::fill_design_row(d, terms, resolved.data(), i, row + 1);
      for (std::size_t j = 0; j < t_term_.size(); ++j) {
        double v = 1.0;
        for (const auto* col : resolved[t_term_[j]]) v *= (*col)[i];
        row[1 + k_ + j] = v;
      }
    }
    acc_.resize(k_ * (k_ + 1) / 2 + k_ + t_term_.size());
  }

  template <std::size_t K, std::size_t NT>
  void accumulate_fixed(double* xtx, double* xty, double* tmean) const {
    for (std::size_t i = 0; i < n_rows_; ++i) {
      double m = multiplicity_[i];
      if (m == 0.0) continue;
      const double* row = rows_.data() + i * (1 + K + NT);
      const double my = m * row[0];
      const double* x = row + 1;
      std::size_t p = 0;
      for (std::size_t a = 0; a < K; ++a) {
        const double mxa = m * x[a];
        for (std::size_t b = a; b < K; ++b) xtx[p++] += mxa * x[b];
        xty[a] += x[a] * my;
      }
      for (std::size_t j = 0; j < NT; ++j) tmean[j] += m * x[K + j];
    }
  }

  double estimate_stream(SeededRng& draw) const override {
    if (saturated_) return saturated_->estimate_stream(draw);
    draw_multiplicities(draw);
    std::fill(acc_.begin(), acc_.end(), 0.0);
    double* xtx = acc_.data();                       // packed upper triangle
    double* xty = acc_.data() + k_ * (k_ + 1) / 2;
    double* tmean = xty + k_;
    if (k_ == 6 && t_term_.size() == 1) {
      accumulate_fixed<6, 1>(xtx, xty, tmean);
    } else if (k_ == 4 && t_term_.size() == 1) {
      accumulate_fixed<4, 1>(xtx, xty, tmean);
    } else {
      for (std::size_t i = 0; i < n_rows_; ++i) {
        double m = multiplicity_[i];
        if (m == 0.0) continue;
        const double* row = rows_.data() + i * stride_;
        const double my = m * row[0];
        const double* x = row + 1;
        std::size_t p = 0;
        for (std::size_t a = 0; a < k_; ++a) {
          const double mxa = m * x[a];
          for (std::size_t b = a; b < k_; ++b) xtx[p++] += mxa * x[b];
          xty[a] += x[a] * my;
        }
        for (std::size_t j = 0; j < t_term_.size(); ++j) {
          tmean[j] += m * x[k_ + j];
        }
      }
    }
    Eigen::MatrixXd full(k_, k_);
    Eigen::VectorXd rhs(k_);
    std::size_t p = 0;
    for (std::size_t a = 0; a < k_; ++a) {
      for (std::size_t b = a; b < k_; ++b) {
        full(a, b) = xtx[p];
        full(b, a) = xtx[p];
        ++p;
      }
      rhs(a) = xty[a];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(full);
    lu.setThreshold(1e-10);
    if (lu.rank() < static_cast<Eigen::Index>(k_)) {
      throw Error("backdoor_param: rank deficient resample");
    }
    Eigen::VectorXd beta = lu.solve(rhs);
    double ate = beta(1);
    for (std::size_t j = 0; j < t_term_.size(); ++j) {
      ate += beta(2 + t_term_[j]) * (tmean[j] / static_cast<double>(n_rows_));
    }
    return ate;
  }

 private:
  std::size_t k_;
  std::size_t n_terms_;
  std::size_t stride_ = 0;
  std::vector<double> rows_;  // per row: [y, design x (k), T-term products]
  std::vector<std::size_t> t_term_;
  mutable std::vector<double> acc_;
  std::optional<ExactBackdoorKernel> saturated_;
};

// Mirrors bootstrap_ci_indices: same substream per attempt, same index
// stream, same redraw-and-cap policy, same percentile rule.
inline ConfidenceInterval bootstrap_ci_kernel(const BootstrapKernel& kernel,
                                              int n_boot, double level,
                                              SeededRng& rng) {
  std::vector<double> estimates;
  estimates.reserve(n_boot);
  ConfidenceInterval ci;
  const long max_attempts = 10L * n_boot;
  long attempts = 0;
  while (estimates.size() < static_cast<std::size_t>(n_boot)) {
    if (attempts >= max_attempts) {
      throw Error("bootstrap_ci: estimator failed on too many resamples");
    }
    SeededRng draw = rng.substream(static_cast<std::uint64_t>(attempts));
    ++attempts;
    try {
      estimates.push_back(kernel.estimate_stream(draw));
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

}  // namespace detail

struct SeedEstimateRecord {
  std::string data_label;
  std::string sampler;
  std::string estimator;
  std::uint64_t seed_index = 0;
  bool failed = false;
  std::string error;
  double gold_ate = std::numeric_limits<double>::quiet_NaN();
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double abs_bias = std::numeric_limits<double>::quiet_NaN();
  double rel_abs_bias = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::pair<double, double>> ci;
  std::optional<bool> covered;  // ci contains this seed's gold_ate
  std::size_t n_rct = 0;
  std::size_t n_obs = 0;
  std::optional<double> m_bound;
  double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
};

struct CellAggregate {
  std::string data_label;
  std::string sampler;
  std::string estimator;
  std::size_t n_seeds_ok = 0;
  std::size_t n_seeds_failed = 0;
  double mean_abs_bias = 0.0;
  double std_abs_bias = 0.0;
  double mean_rel_abs_bias = 0.0;
  double std_rel_abs_bias = 0.0;
  std::optional<double> ci_coverage;
};

struct BenchmarkResult {
  std::vector<SeedEstimateRecord> per_seed;
  std::vector<CellAggregate> cells;
};

namespace detail {

inline void mean_std(const std::vector<double>& v, double& mean,
                     double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) sd += (x - mean) * (x - mean);
  sd = std::sqrt(sd / static_cast<double>(v.size()));
}

struct ResolvedSource {
  std::string label;
  std::optional<DgpSetting> dgp;        // synthetic source
  std::shared_ptr<TabularDataset> csv;  // fixed external source
  ConfoundingFunction confounding =
      ConfoundingFunction::piecewise("C", 0.5, 0.5, true);
  std::vector<AdjustmentTerm> terms;
  bool has_terms = false;
};

inline bool wants_ml(const std::vector<std::string>& estimators) {
  for (const auto& e : estimators) {
    if (e == "q" || e == "iptw" || e == "aiptw" || e == "dml") return true;
  }
  return false;
}

}  // namespace detail

// Loads the config's external CSV and applies the subpopulation filter and
// bag-of-words featurization it asks for. Exposed for the CLI's ingest
// command and the proof-of-concept pipeline.
inline TabularDataset load_csv_source(const BenchmarkConfig& cfg) {
  CsvSchema schema = load_schema(cfg.schema_path);
  IngestedDataset ing = ingest_csv(cfg.csv_path, schema);
  if (cfg.subpopulation) {
    ing = subpopulation_filter(ing, cfg.subpopulation->first,
                               cfg.subpopulation->second);
  }
  if (!ing.documents.empty()) {
    Vocabulary vocab = build_vocabulary(ing.documents, cfg.vocabulary);
    ing.data.proxies = featurize(ing.documents, vocab);
  }
  require_valid(ing.data);
  return std::move(ing.data);
}

// Runs the full config: for every data source x seed, draw (or reuse) the
// RCT, subsample with each configured sampler, apply each estimator, and
// bootstrap confidence intervals where configured. Fully deterministic given
// master_seed, regardless of worker count. Per-seed faults are recorded and
// excluded; a cell with more than 10% failed seeds aborts the run.
inline BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  const std::size_t n_sources = cfg.n_data_sources();
  const std::size_t n_samplers = cfg.samplers.size();
  const std::size_t n_estimators = cfg.estimators.size();
  const std::size_t n_seeds = static_cast<std::size_t>(cfg.n_seeds);
  if (n_samplers == 0 || n_estimators == 0) {
    throw ConfigError("config needs at least one sampler and one estimator");
  }

  // Resolve sources, confounding functions and adjustment terms up front.
  std::vector<detail::ResolvedSource> sources(n_sources);
  for (std::size_t si = 0; si < n_sources; ++si) {
    auto& src = sources[si];
    src.label = cfg.data_label(si);
    if (cfg.uses_csv()) {
      src.csv = std::make_shared<TabularDataset>(load_csv_source(cfg));
    } else {
      src.dgp = dgp_setting(cfg.dgp_settings[si], cfg.n);
    }
    bool needs_f = false;
    for (const auto& s : cfg.samplers) needs_f = needs_f || s != "none";
    if (cfg.confounding) {
      src.confounding = *cfg.confounding;
    } else if (src.dgp) {
      src.confounding = dgp_confounding_function(src.dgp->id);
    } else if (needs_f) {
      throw ConfigError("csv data source requires an explicit confounding "
                        "spec when a sampler is configured");
    }
    if (cfg.adjustment_terms) {
      src.terms = *cfg.adjustment_terms;
      src.has_terms = true;
    } else if (src.dgp) {
      src.terms = src.dgp->oracle_adjustment_terms;
      src.has_terms = true;
    }
    for (const auto& e : cfg.estimators) {
      if (e == "backdoor_param" && !src.has_terms) {
        throw ConfigError("backdoor_param on csv data requires "
                          "adjustment_terms");
      }
    }
  }

  bool ml_needed = detail::wants_ml(cfg.estimators);

  auto bootstrap_wanted = [&](const std::string& est) {
    for (const auto& b : cfg.bootstrap_estimators) {
      if (b == est) return true;
    }
    return false;
  };

  BenchmarkResult result;
  result.per_seed.resize(n_sources * n_seeds * n_samplers * n_estimators);
  auto slot = [&](std::size_t si, std::size_t seed, std::size_t sa,
                  std::size_t e) -> SeedEstimateRecord& {
    return result.per_seed[((si * n_seeds + seed) * n_samplers + sa) *
                               n_estimators +
                           e];
  };

  auto run_task = [&](std::size_t task) {
    const std::size_t si = task / n_seeds;
    const std::size_t seed = task % n_seeds;
    const auto& src = sources[si];

    for (std::size_t sa = 0; sa < n_samplers; ++sa) {
      for (std::size_t e = 0; e < n_estimators; ++e) {
        auto& rec = slot(si, seed, sa, e);
        rec.data_label = src.label;
        rec.sampler = cfg.samplers[sa];
        rec.estimator = cfg.estimators[e];
        rec.seed_index = seed;
      }
    }

    TabularDataset generated;
    const TabularDataset* rct = nullptr;
    double gold = 0.0;
    try {
      if (src.dgp) {
        SeededRng gen_rng(derive_seed(
            derive_seed(cfg.master_seed, "rct|" + src.label), seed));
        generated = generate(*src.dgp, gen_rng);
        rct = &generated;
      } else {
        rct = src.csv.get();
      }
      gold = diff_in_means(*rct).point_estimate;
    } catch (const Error& err) {
      for (std::size_t sa = 0; sa < n_samplers; ++sa) {
        for (std::size_t e = 0; e < n_estimators; ++e) {
          auto& rec = slot(si, seed, sa, e);
          rec.failed = true;
          rec.error = err.what();
        }
      }
      return;
    }

    for (std::size_t sa = 0; sa < n_samplers; ++sa) {
      const std::string& sampler = cfg.samplers[sa];
      SamplerReport rep;
      const TabularDataset* obs = nullptr;
      std::optional<double> m_bound;
      double acceptance = 1.0;
      try {
        if (sampler == "none") {
          obs = rct;
        } else {
          SeededRng samp_rng(derive_seed(
              derive_seed(cfg.master_seed,
                          "sample|" + src.label + "|" + sampler),
              seed));
          rep = sampler == "rejection"
                    ? rct_rejection_sample(*rct, src.confounding, samp_rng)
                    : gentzel_sample(*rct, src.confounding, samp_rng);
          obs = &rep.output;
          m_bound = rep.m_bound;
          acceptance = rep.acceptance_rate;
        }
      } catch (const Error& err) {
        for (std::size_t e = 0; e < n_estimators; ++e) {
          auto& rec = slot(si, seed, sa, e);
          rec.failed = true;
          rec.error = err.what();
          rec.gold_ate = gold;
          rec.n_rct = rct->n_rows;
        }
        continue;
      }

      std::optional<NuisanceEstimates> nuis;
      if (ml_needed) {
        try {
          SeededRng cf_rng(derive_seed(
              derive_seed(cfg.master_seed,
                          "crossfit|" + src.label + "|" + sampler),
              seed));
          nuis = crossfit_nuisances(*obs, cfg.base_learner, cfg.k_folds,
                                    cf_rng);
        } catch (const Error& err) {
          nuis.reset();
          // recorded per ML estimator below
          for (std::size_t e = 0; e < n_estimators; ++e) {
            const std::string& est = cfg.estimators[e];
            if (est == "q" || est == "iptw" || est == "aiptw" ||
                est == "dml") {
              auto& rec = slot(si, seed, sa, e);
              rec.failed = true;
              rec.error = err.what();
            }
          }
        }
      }

      for (std::size_t e = 0; e < n_estimators; ++e) {
        const std::string& est = cfg.estimators[e];
        auto& rec = slot(si, seed, sa, e);
        rec.gold_ate = gold;
        rec.n_rct = rct->n_rows;
        rec.n_obs = obs->n_rows;
        rec.m_bound = m_bound;
        rec.acceptance_rate = acceptance;
        if (rec.failed) continue;
        try {
          EstimateRecord er;
          std::unique_ptr<detail::BootstrapKernel> kernel;
          const bool boot = bootstrap_wanted(est);
          if (est == "dim") {
            er = diff_in_means(*obs);
            if (boot) kernel = std::make_unique<detail::DimKernel>(*obs);
          } else if (est == "backdoor_exact") {
            er = exact_backdoor_binary(*obs, cfg.adjustment_covariate);
            if (boot) {
              kernel = std::make_unique<detail::ExactBackdoorKernel>(
                  *obs, cfg.adjustment_covariate);
            }
          } else if (est == "backdoor_param") {
            er = parametric_backdoor(*obs, src.terms);
            if (boot) {
              kernel = std::make_unique<detail::ParamBackdoorKernel>(
                  *obs, src.terms);
            }
          } else if (est == "q") {
            er = tau_q(*obs, *nuis);
          } else if (est == "iptw") {
            er = tau_iptw(*obs, *nuis);
          } else if (est == "aiptw") {
            er = tau_aiptw(*obs, *nuis);
          } else {
            er = tau_dml(*obs, *nuis);
          }
          rec.estimate = er.point_estimate;
          rec.abs_bias = std::fabs(er.point_estimate - gold);
          rec.rel_abs_bias = gold == 0.0
                                 ? std::numeric_limits<double>::quiet_NaN()
                                 : rec.abs_bias / std::fabs(gold);
          if (kernel) {
            SeededRng boot_rng(derive_seed(
                derive_seed(cfg.master_seed, "boot|" + src.label + "|" +
                                                 sampler + "|" + est),
                seed));
            auto ci = detail::bootstrap_ci_kernel(*kernel, cfg.n_boot,
                                                  cfg.ci_level, boot_rng);
            rec.ci = {ci.lo, ci.hi};
            rec.covered = ci.lo <= gold && gold <= ci.hi;
          }
        } catch (const Error& err) {
          rec.failed = true;
          rec.error = err.what();
        }
      }
    }
  };

  parallel_for(n_sources * n_seeds, cfg.n_workers, run_task);

  // Aggregate per (data, sampler, estimator) cell.
  for (std::size_t si = 0; si < n_sources; ++si) {
    for (std::size_t sa = 0; sa < n_samplers; ++sa) {
      for (std::size_t e = 0; e < n_estimators; ++e) {
        CellAggregate agg;
        agg.data_label = sources[si].label;
        agg.sampler = cfg.samplers[sa];
        agg.estimator = cfg.estimators[e];
        std::vector<double> abs_b, rel_b;
        std::size_t covered = 0, with_ci = 0;
        for (std::size_t seed = 0; seed < n_seeds; ++seed) {
          const auto& rec = slot(si, seed, sa, e);
          if (rec.failed) {
            ++agg.n_seeds_failed;
            continue;
          }
          ++agg.n_seeds_ok;
          abs_b.push_back(rec.abs_bias);
          if (std::isfinite(rec.rel_abs_bias)) {
            rel_b.push_back(rec.rel_abs_bias);
          }
          if (rec.covered) {
            ++with_ci;
            covered += *rec.covered ? 1 : 0;
          }
        }
        if (agg.n_seeds_failed * 10 > n_seeds) {
          throw SeedFailureError(
              "cell (" + agg.data_label + ", " + agg.sampler + ", " +
              agg.estimator + ") failed on " +
              std::to_string(agg.n_seeds_failed) + " of " +
              std::to_string(n_seeds) + " seeds");
        }
        detail::mean_std(abs_b, agg.mean_abs_bias, agg.std_abs_bias);
        detail::mean_std(rel_b, agg.mean_rel_abs_bias, agg.std_rel_abs_bias);
        if (with_ci > 0) {
          agg.ci_coverage =
              static_cast<double>(covered) / static_cast<double>(with_ci);
        }
        result.cells.push_back(std::move(agg));
      }
    }
  }
  return result;
}

namespace detail {

inline std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace detail

inline std::string per_seed_csv(const BenchmarkResult& result) {
  std::string out =
      "data,sampler,estimator,seed,gold_ate,estimate,abs_bias,rel_abs_bias,"
      "ci_lo,ci_hi,covered,n_rct,n_obs,m_bound,acceptance_rate,error\n";
  for (const auto& r : result.per_seed) {
    out += r.data_label + ',' + r.sampler + ',' + r.estimator + ',';
    out += std::to_string(r.seed_index) + ',';
    if (r.failed) {
      out += ",,,,,,,";
      out += std::to_string(r.n_rct) + ',' + std::to_string(r.n_obs) + ",,,";
      out += csv_quote(r.error);
    } else {
      out += format_double(r.gold_ate) + ',' + format_double(r.estimate) +
             ',' + format_double(r.abs_bias) + ',';
      out += std::isfinite(r.rel_abs_bias) ? format_double(r.rel_abs_bias)
                                           : std::string();
      out += ',';
      out += r.ci ? format_double(r.ci->first) : std::string();
      out += ',';
      out += r.ci ? format_double(r.ci->second) : std::string();
      out += ',';
      out += r.covered ? (*r.covered ? "1" : "0") : "";
      out += ',' + std::to_string(r.n_rct) + ',' + std::to_string(r.n_obs) +
             ',';
      out += r.m_bound ? format_double(*r.m_bound) : std::string();
      out += ',' + format_double(r.acceptance_rate) + ',';
    }
    out += '\n';
  }
  return out;
}

inline std::string table2_csv(const BenchmarkResult& result) {
  std::string out =
      "data,sampler,estimator,n_seeds_ok,n_seeds_failed,mean_abs_bias,"
      "std_abs_bias,mean_rel_abs_bias,std_rel_abs_bias,ci_coverage\n";
  for (const auto& c : result.cells) {
    out += c.data_label + ',' + c.sampler + ',' + c.estimator + ',';
    out += std::to_string(c.n_seeds_ok) + ',' +
           std::to_string(c.n_seeds_failed) + ',';
    out += format_double(c.mean_abs_bias) + ',' +
           format_double(c.std_abs_bias) + ',';
    out += format_double(c.mean_rel_abs_bias) + ',' +
           format_double(c.std_rel_abs_bias) + ',';
    out += detail::opt_field(c.ci_coverage);
    out += '\n';
  }
  return out;
}

// Writes table2.csv, per_seed.csv and config.lock.json into outdir
// (atomically; byte-stable given identical inputs).
inline void emit_reports(const BenchmarkResult& result,
                         const BenchmarkConfig& cfg,
                         const std::string& outdir) {
  std::filesystem::create_directories(outdir);
  write_file_atomic(outdir + "/per_seed.csv", per_seed_csv(result));
  write_file_atomic(outdir + "/table2.csv", table2_csv(result));
  write_file_atomic(outdir + "/config.lock.json",
                    config_to_json(cfg).dump(2) + "\n");
}

// Scatter of (naive_gap, oracle_gap) with the y = x reference line.
inline std::string diagnostic_scatter_svg(
    const std::vector<DiagnosticPoint>& points, const std::string& title) {
  const double w = 480, h = 480, m = 48;
  double maxv = 1e-9;
  for (const auto& p : points) {
    if (p.failed) continue;
    maxv = std::max({maxv, p.naive_gap, p.oracle_gap});
  }
  maxv *= 1.05;
  auto sx = [&](double v) { return m + (w - 2 * m) * v / maxv; };
  auto sy = [&](double v) { return h - m - (h - 2 * m) * v / maxv; };
  char buf[256];
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" "
         "height=\"480\" viewBox=\"0 0 480 480\">\n";
  svg += "<rect width=\"480\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"20\" font-size=\"13\" "
                "text-anchor=\"middle\">%s</text>\n",
                w / 2, title.c_str());
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"black\"/>\n",
                sx(0.0), sy(0.0), sx(maxv), sy(0.0));
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"black\"/>\n",
                sx(0.0), sy(0.0), sx(0.0), sy(maxv));
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"red\" stroke-dasharray=\"4 3\"/>\n",
                sx(0.0), sy(0.0), sx(maxv), sy(maxv));
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" "
                "text-anchor=\"middle\">naive gap (max %.4g)</text>\n",
                w / 2, h - 12.0, maxv);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"14\" y=\"%.1f\" font-size=\"11\" "
                "text-anchor=\"middle\" transform=\"rotate(-90 14 %.1f)\">"
                "oracle-adjusted gap</text>\n",
                h / 2, h / 2);
  svg += buf;
  for (const auto& p : points) {
    if (p.failed) continue;
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"none\" "
                  "stroke=\"#3366cc\"/>\n",
                  sx(p.naive_gap), sy(p.oracle_gap));
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

// The `diagnose` pipeline: one fixed RCT from the configured source, then a
// sampling sweep over the configured f grid. Emits one CSV and one SVG per
// f plus a summary CSV.
inline std::vector<DiagnosticSweepResult> run_diagnose(
    const BenchmarkConfig& cfg, const std::string& outdir) {
  if (!cfg.diagnostic) {
    throw ConfigError("diagnose needs a 'diagnostic' config section");
  }
  TabularDataset rct;
  std::vector<AdjustmentTerm> terms;
  bool has_terms = false;
  if (cfg.uses_csv()) {
    rct = load_csv_source(cfg);
    if (cfg.adjustment_terms) {
      terms = *cfg.adjustment_terms;
      has_terms = true;
    }
  } else {
    auto setting = dgp_setting(cfg.dgp_settings.at(0), cfg.n);
    SeededRng gen_rng(derive_seed(cfg.master_seed, "diagnose_rct"));
    rct = generate(setting, gen_rng);
    terms = setting.oracle_adjustment_terms;
    has_terms = true;
  }
  DatasetEstimator oracle;
  if (has_terms) {
    auto t = terms;
    oracle = [t](const TabularDataset& d) {
      return parametric_backdoor(d, t).point_estimate;
    };
  } else {
    auto cov = cfg.adjustment_covariate;
    oracle = [cov](const TabularDataset& d) {
      return exact_backdoor_binary(d, cov).point_estimate;
    };
  }
  SeededRng master(derive_seed(cfg.master_seed, "diagnose"));
  auto results = diagnostic_sweep(rct, cfg.diagnostic->f_grid,
                                  cfg.diagnostic->n_seeds, oracle, master);

  std::filesystem::create_directories(outdir);
  std::string summary = "f_index,f,n_seeds,n_failed,fraction_below\n";
  for (std::size_t fi = 0; fi < results.size(); ++fi) {
    const auto& res = results[fi];
    std::string csv = "seed,naive_gap,oracle_gap,below_line\n";
    for (const auto& p : res.points) {
      if (p.failed) continue;
      csv += std::to_string(p.seed_index) + ',' +
             format_double(p.naive_gap) + ',' + format_double(p.oracle_gap) +
             ',' + (p.below_line ? "1" : "0") + '\n';
    }
    std::string stem = outdir + "/diagnostic_f" + std::to_string(fi);
    write_file_atomic(stem + ".csv", csv);
    write_file_atomic(stem + ".svg",
                      diagnostic_scatter_svg(res.points, res.f.describe()));
    summary += std::to_string(fi) + ',' + csv_quote(res.f.describe()) + ',' +
               std::to_string(res.points.size()) + ',' +
               std::to_string(res.n_failed) + ',' +
               format_double(res.fraction_below) + '\n';
  }
  write_file_atomic(outdir + "/diagnostic_summary.csv", summary);
  return results;
}

}  // namespace rctbench

#endif  // RCTBENCH_BENCH_HPP
