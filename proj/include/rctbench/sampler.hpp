#ifndef RCTBENCH_SAMPLER_HPP
#define RCTBENCH_SAMPLER_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "rctbench/confounding.hpp"
#include "rctbench/dataset.hpp"
#include "rctbench/rng.hpp"

namespace rctbench {

struct SamplerReport {
  TabularDataset output;
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  std::optional<double> m_bound;  // rejection sampler only
  double acceptance_rate = 0.0;
  // Per input row, the probability that the row is retained; audit trail for
  // the acceptance invariants. Always in (0, 1].
  std::vector<double> acceptance_probabilities;
};

// Empirical bound on the likelihood ratio P*(T|C) / P(T):
//   max_i P*(T=t_i | C_i) / min_t Phat(T=t)
// with Phat the arm fractions of the full dataset. Requires both arms.
inline double estimate_m_bound(const TabularDataset& rct,
                               const ConfoundingFunction& f) {
  require_both_arms(rct, "estimate_m_bound");
  std::size_t n1 = count_treated(rct);
  double p1 = static_cast<double>(n1) / static_cast<double>(rct.n_rows);
  double min_arm = std::min(p1, 1.0 - p1);
  double max_num = 0.0;
  for (std::size_t i = 0; i < rct.n_rows; ++i) {
    double ps1 = evaluate_pstar(f, rct, i);
    double ps_t = rct.treatment[i] == 1 ? ps1 : 1.0 - ps1;
    max_num = std::max(max_num, ps_t);
  }
  return max_num / min_arm;
}

// Subsamples an RCT so the retained rows follow
//   P*(C, T, Y) = P(C) * P*(T|C) * P(Y|T,C):
// row i is kept iff U_i <= P*(T=t_i|C_i) / (Phat(T=t_i) * M), one uniform
// per row in dataset order. Arm fractions Phat are frozen from the full
// input before the loop. M defaults to estimate_m_bound; a caller-supplied
// bound must dominate the observed likelihood ratios or acceptance
// probabilities would exceed 1 (faulted).
inline SamplerReport rct_rejection_sample(
    const TabularDataset& rct, const ConfoundingFunction& f, SeededRng& rng,
    std::optional<double> m_bound = std::nullopt) {
  require_valid(rct);
  require_both_arms(rct, "rct_rejection_sample");
  std::size_t n1 = count_treated(rct);
  double p1 = static_cast<double>(n1) / static_cast<double>(rct.n_rows);
  double m = m_bound ? *m_bound : estimate_m_bound(rct, f);

  SamplerReport rep;
  rep.n_in = rct.n_rows;
  rep.m_bound = m;
  rep.acceptance_probabilities.resize(rct.n_rows);
  std::vector<char> keep(rct.n_rows, 0);
  for (std::size_t i = 0; i < rct.n_rows; ++i) {
    double ps1 = evaluate_pstar(f, rct, i);
    double ps_t = rct.treatment[i] == 1 ? ps1 : 1.0 - ps1;
    double phat_t = rct.treatment[i] == 1 ? p1 : 1.0 - p1;
    double accept = ps_t / (phat_t * m);
    if (accept > 1.0 + 1e-12) {
      throw Error("rct_rejection_sample: acceptance probability " +
                  std::to_string(accept) + " exceeds 1 at row " +
                  std::to_string(i) + "; M bound too small");
    }
    accept = std::min(accept, 1.0);
    rep.acceptance_probabilities[i] = accept;
    keep[i] = rng.uniform01() <= accept ? 1 : 0;
  }
  rep.output = select_rows(rct, keep);
  rep.n_out = rep.output.n_rows;
  rep.acceptance_rate =
      static_cast<double>(rep.n_out) / static_cast<double>(rep.n_in);
  if (rep.n_out == 0) {
    throw Error("rct_rejection_sample: all " + std::to_string(rep.n_in) +
                " rows were discarded; confounding function " + f.describe() +
                " leaves nothing to estimate on");
  }
  return rep;
}

// Baseline subsampler: row i is kept iff an independent Bernoulli(f(C_i))
// draw equals t_i. The retained rows follow P(C, T, Y | S=1), which distorts
// the covariate marginal whenever the arm fractions are asymmetric.
inline SamplerReport gentzel_sample(const TabularDataset& rct,
                                    const ConfoundingFunction& f,
                                    SeededRng& rng) {
  require_valid(rct);
  require_both_arms(rct, "gentzel_sample");
  SamplerReport rep;
  rep.n_in = rct.n_rows;
  rep.acceptance_probabilities.resize(rct.n_rows);
  std::vector<char> keep(rct.n_rows, 0);
  for (std::size_t i = 0; i < rct.n_rows; ++i) {
    double ps1 = evaluate_pstar(f, rct, i);
    int b = rng.bernoulli(ps1) ? 1 : 0;
    keep[i] = (b == rct.treatment[i]) ? 1 : 0;
    rep.acceptance_probabilities[i] =
        rct.treatment[i] == 1 ? ps1 : 1.0 - ps1;
  }
  rep.output = select_rows(rct, keep);
  rep.n_out = rep.output.n_rows;
  rep.acceptance_rate =
      static_cast<double>(rep.n_out) / static_cast<double>(rep.n_in);
  if (rep.n_out == 0) {
    throw Error("gentzel_sample: all rows were discarded");
  }
  return rep;
}

}  // namespace rctbench

#endif  // RCTBENCH_SAMPLER_HPP
