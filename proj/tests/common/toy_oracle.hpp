#ifndef RCTBENCH_TESTS_TOY_ORACLE_HPP
#define RCTBENCH_TESTS_TOY_ORACLE_HPP

// Fully discrete toy RCT (binary C, T, Y) with a known probability table.
// Everything here is test-side oracle arithmetic: exact cell probabilities
// for the RCT, for the rejection-sampling target P(C) P*(T|C) P(Y|T,C), and
// for the match-the-coin selected distribution, computed by brute force and
// independent of the library implementation.

#include <array>
#include <cmath>

#include "rctbench/confounding.hpp"
#include "rctbench/dataset.hpp"
#include "rctbench/rng.hpp"

namespace toy {

struct ToySpec {
  double p_c1 = 0.4;
  double p_t1 = 0.3;
  // q[t][c] = P(Y=1 | T=t, C=c)
  double q[2][2] = {{0.2, 0.6}, {0.5, 0.8}};
  double zeta0 = 0.85;  // P*(T=1 | C=0)
  double zeta1 = 0.15;  // P*(T=1 | C=1)

  double pstar(int c) const { return c == 0 ? zeta0 : zeta1; }
  double pstar_t(int t, int c) const {
    return t == 1 ? pstar(c) : 1.0 - pstar(c);
  }
  double pc(int c) const { return c == 1 ? p_c1 : 1.0 - p_c1; }
  double pt(int t) const { return t == 1 ? p_t1 : 1.0 - p_t1; }
  double py(int y, int t, int c) const {
    return y == 1 ? q[t][c] : 1.0 - q[t][c];
  }
};

inline int cell_index(int c, int t, int y) { return c * 4 + t * 2 + y; }

inline double true_ate(const ToySpec& s) {
  double ate = 0.0;
  for (int c = 0; c < 2; ++c) {
    ate += s.pc(c) * (s.q[1][c] - s.q[0][c]);
  }
  return ate;
}

// P(c, t, y) under the RCT: P(c) P(t) P(y|t,c).
inline std::array<double, 8> rct_joint(const ToySpec& s) {
  std::array<double, 8> p{};
  for (int c = 0; c < 2; ++c) {
    for (int t = 0; t < 2; ++t) {
      for (int y = 0; y < 2; ++y) {
        p[cell_index(c, t, y)] = s.pc(c) * s.pt(t) * s.py(y, t, c);
      }
    }
  }
  return p;
}

// Rejection-sampling target: P(c) P*(t|c) P(y|t,c).
inline std::array<double, 8> target_joint(const ToySpec& s) {
  std::array<double, 8> p{};
  for (int c = 0; c < 2; ++c) {
    for (int t = 0; t < 2; ++t) {
      for (int y = 0; y < 2; ++y) {
        p[cell_index(c, t, y)] = s.pc(c) * s.pstar_t(t, c) * s.py(y, t, c);
      }
    }
  }
  return p;
}

// Distribution of rows retained by the match-the-coin baseline:
// proportional to P(c) P(t) P*(t|c) P(y|t,c), renormalized.
inline std::array<double, 8> selected_joint(const ToySpec& s) {
  std::array<double, 8> p{};
  double z = 0.0;
  for (int c = 0; c < 2; ++c) {
    for (int t = 0; t < 2; ++t) {
      for (int y = 0; y < 2; ++y) {
        double v = s.pc(c) * s.pt(t) * s.pstar_t(t, c) * s.py(y, t, c);
        p[cell_index(c, t, y)] = v;
        z += v;
      }
    }
  }
  for (auto& v : p) v /= z;
  return p;
}

inline double dim_from_joint(const std::array<double, 8>& p) {
  double num1 = 0, den1 = 0, num0 = 0, den0 = 0;
  for (int c = 0; c < 2; ++c) {
    num1 += p[cell_index(c, 1, 1)];
    den1 += p[cell_index(c, 1, 0)] + p[cell_index(c, 1, 1)];
    num0 += p[cell_index(c, 0, 1)];
    den0 += p[cell_index(c, 0, 0)] + p[cell_index(c, 0, 1)];
  }
  return num1 / den1 - num0 / den0;
}

inline double backdoor_from_joint(const std::array<double, 8>& p) {
  double ate = 0.0;
  for (int c = 0; c < 2; ++c) {
    double pc = 0, m1 = 0, n1 = 0, m0 = 0, n0 = 0;
    for (int t = 0; t < 2; ++t) {
      for (int y = 0; y < 2; ++y) pc += p[cell_index(c, t, y)];
    }
    m1 = p[cell_index(c, 1, 1)];
    n1 = p[cell_index(c, 1, 0)] + p[cell_index(c, 1, 1)];
    m0 = p[cell_index(c, 0, 1)];
    n0 = p[cell_index(c, 0, 0)] + p[cell_index(c, 0, 1)];
    ate += pc * (m1 / n1 - m0 / n0);
  }
  return ate;
}

inline double marginal_c1(const std::array<double, 8>& p) {
  double s = 0.0;
  for (int t = 0; t < 2; ++t) {
    for (int y = 0; y < 2; ++y) s += p[cell_index(1, t, y)];
  }
  return s;
}

inline double odds_ratio_tc(const std::array<double, 8>& p) {
  double n[2][2] = {{0, 0}, {0, 0}};  // [t][c]
  for (int c = 0; c < 2; ++c) {
    for (int t = 0; t < 2; ++t) {
      for (int y = 0; y < 2; ++y) n[t][c] += p[cell_index(c, t, y)];
    }
  }
  return (n[1][1] * n[0][0]) / (n[1][0] * n[0][1]);
}

// One RCT draw following the structural process (C, then T, then Y).
inline rctbench::TabularDataset draw_rct(const ToySpec& s, std::size_t n,
                                         rctbench::SeededRng& rng) {
  rctbench::TabularDataset d;
  d.n_rows = n;
  d.covariate_names = {"C"};
  std::vector<double> c(n);
  d.treatment.resize(n);
  d.outcome.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = rng.bernoulli(s.p_c1) ? 1.0 : 0.0;
    d.treatment[i] = rng.bernoulli(s.p_t1) ? 1 : 0;
    d.outcome[i] =
        rng.bernoulli(s.q[d.treatment[i]][c[i] == 1.0 ? 1 : 0]) ? 1.0 : 0.0;
  }
  d.covariates.push_back(std::move(c));
  return d;
}

// One draw directly from an arbitrary 8-cell joint.
inline rctbench::TabularDataset draw_from_joint(const std::array<double, 8>& p,
                                                std::size_t n,
                                                rctbench::SeededRng& rng) {
  std::array<double, 8> cdf{};
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  rctbench::TabularDataset d;
  d.n_rows = n;
  d.covariate_names = {"C"};
  std::vector<double> c(n);
  d.treatment.resize(n);
  d.outcome.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform01() * acc;
    int cell = 0;
    while (cell < 7 && u > cdf[cell]) ++cell;
    c[i] = cell / 4;
    d.treatment[i] = (cell / 2) % 2;
    d.outcome[i] = cell % 2;
  }
  d.covariates.push_back(std::move(c));
  return d;
}

// Dataset with exactly count[cell] copies of each (c,t,y) combination.
inline rctbench::TabularDataset dataset_from_counts(
    const std::array<int, 8>& counts) {
  rctbench::TabularDataset d;
  d.covariate_names = {"C"};
  std::vector<double> c;
  for (int cell = 0; cell < 8; ++cell) {
    for (int k = 0; k < counts[cell]; ++k) {
      c.push_back(cell / 4);
      d.treatment.push_back((cell / 2) % 2);
      d.outcome.push_back(cell % 2);
    }
  }
  d.n_rows = c.size();
  d.covariates.push_back(std::move(c));
  return d;
}

inline rctbench::ConfoundingFunction toy_f(const ToySpec& s) {
  return rctbench::ConfoundingFunction::piecewise("C", s.zeta0, s.zeta1);
}

}  // namespace toy

#endif  // RCTBENCH_TESTS_TOY_ORACLE_HPP
