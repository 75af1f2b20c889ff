#ifndef RCTBENCH_LEARNERS_HPP
#define RCTBENCH_LEARNERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rctbench/confounding.hpp"  // expit
#include "rctbench/dataset.hpp"
#include "rctbench/rng.hpp"

namespace rctbench {

// Column-major feature store shared by both learner families. Binary columns
// keep the row ids that are 1 (and a row-major mirror for point lookups);
// continuous columns are dense.
struct FeatureMatrix {
  struct Column {
    bool binary = true;
    std::vector<std::uint32_t> nz;  // rows where the value is 1 (sorted)
    std::vector<double> dense;
  };

  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<Column> columns;
  std::vector<std::vector<std::uint32_t>> row_nz;  // binary col ids per row

  static FeatureMatrix from_sparse(const SparseBinaryMatrix& m) {
    FeatureMatrix fm;
    fm.n_rows = m.n_rows;
    fm.n_cols = m.n_cols;
    fm.columns.resize(m.n_cols);
    fm.row_nz = m.rows;
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
      for (std::uint32_t c : m.rows[i]) {
        fm.columns[c].nz.push_back(static_cast<std::uint32_t>(i));
      }
    }
    return fm;
  }

  static FeatureMatrix from_dense(std::vector<std::vector<double>> cols) {
    FeatureMatrix fm;
    fm.n_cols = cols.size();
    fm.n_rows = cols.empty() ? 0 : cols[0].size();
    fm.columns.resize(fm.n_cols);
    for (std::size_t j = 0; j < fm.n_cols; ++j) {
      fm.columns[j].binary = false;
      fm.columns[j].dense = std::move(cols[j]);
    }
    return fm;
  }

  // Estimation features: the high-dimensional proxies when present,
  // otherwise the low-dimensional covariates.
  static FeatureMatrix from_dataset(const TabularDataset& d) {
    if (d.proxies) return from_sparse(*d.proxies);
    return from_dense(d.covariates);
  }

  double value(std::size_t row, std::size_t col) const {
    const Column& c = columns[col];
    if (!c.binary) return c.dense[row];
    const auto& r = row_nz[row];
    return std::binary_search(r.begin(), r.end(),
                              static_cast<std::uint32_t>(col))
               ? 1.0
               : 0.0;
  }

  FeatureMatrix subset(std::span<const std::uint32_t> rows) const {
    FeatureMatrix out;
    out.n_rows = rows.size();
    out.n_cols = n_cols;
    out.columns.resize(n_cols);
    bool any_binary = false;
    for (std::size_t j = 0; j < n_cols; ++j) {
      out.columns[j].binary = columns[j].binary;
      if (!columns[j].binary) {
        out.columns[j].dense.resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          out.columns[j].dense[i] = columns[j].dense[rows[i]];
        }
      } else {
        any_binary = true;
      }
    }
    if (any_binary) {
      out.row_nz.resize(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row_nz[i] = row_nz[rows[i]];
        for (std::uint32_t c : out.row_nz[i]) {
          out.columns[c].nz.push_back(static_cast<std::uint32_t>(i));
        }
      }
    }
    return out;
  }
};

struct BaseLearnerSpec {
  enum class Family { LogisticElasticNet, GradientBoostedTrees };
  Family family = Family::LogisticElasticNet;

  // Elastic-net logistic regression.
  double l1_ratio = 0.1;
  std::vector<double> regularization_grid = {1e-4, 1e-3, 1e-2,
                                             1e-1, 1e0,  1e1};
  bool balanced_class_weights = true;
  double tolerance = 1e-6;
  int max_iterations = 5000;
  int inner_cv_folds = 5;

  // Gradient boosted trees.
  int n_trees = 200;
  int max_depth = 6;
  double learning_rate = 0.1;

  std::string name() const {
    return family == Family::LogisticElasticNet ? "logistic_elastic_net"
                                                : "gbdt";
  }

  std::string provenance() const {
    if (family == Family::LogisticElasticNet) {
      std::string g;
      for (double c : regularization_grid) {
        if (!g.empty()) g += ",";
        g += std::to_string(c);
      }
      return name() + "(l1_ratio=" + std::to_string(l1_ratio) + ",grid=[" +
             g + "],balanced=" + (balanced_class_weights ? "1" : "0") +
             ",tol=" + std::to_string(tolerance) +
             ",max_iter=" + std::to_string(max_iterations) +
             ",inner_cv=" + std::to_string(inner_cv_folds) + ")";
    }
    return name() + "(n_trees=" + std::to_string(n_trees) +
           ",depth=" + std::to_string(max_depth) +
           ",lr=" + std::to_string(learning_rate) + ",loss=logistic)";
  }

  static BaseLearnerSpec elastic_net() { return BaseLearnerSpec{}; }
  static BaseLearnerSpec gbdt() {
    BaseLearnerSpec s;
    s.family = Family::GradientBoostedTrees;
    return s;
  }
};

// A trained P(label=1 | x) model.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<double> predict_proba(const FeatureMatrix& fm) const = 0;
  virtual std::string describe() const = 0;
};

inline void require_binary_labels(std::span<const double> y) {
  for (double v : y) {
    if (v != 0.0 && v != 1.0) {
      throw Error("base learners require binary 0/1 labels, got " +
                  std::to_string(v));
    }
  }
}

// Weighted mean log loss plus the elastic-net penalty
//   lambda * (l1_ratio * |w|_1 + (1 - l1_ratio)/2 * |w|_2^2);
// the grid values are inverse regularization strengths C with
// lambda = 1 / (C * sum of sample weights). The intercept is unpenalized.
inline double elastic_net_objective(const FeatureMatrix& fm,
                                    std::span<const double> y,
                                    std::span<const double> sample_weight,
                                    std::span<const double> w, double b,
                                    double lambda, double l1_ratio) {
  double wsum = 0.0;
  for (double v : sample_weight) wsum += v;
  std::vector<double> z(fm.n_rows, b);
  for (std::size_t j = 0; j < fm.n_cols; ++j) {
    if (w[j] == 0.0) continue;
    const auto& col = fm.columns[j];
    if (col.binary) {
      for (std::uint32_t i : col.nz) z[i] += w[j];
    } else {
      for (std::size_t i = 0; i < fm.n_rows; ++i) z[i] += w[j] * col.dense[i];
    }
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < fm.n_rows; ++i) {
    // log(1 + exp(-|z|)) form avoids overflow
    double zy = y[i] == 1.0 ? z[i] : -z[i];
    double l = zy > 0 ? std::log1p(std::exp(-zy)) : -zy + std::log1p(std::exp(zy));
    loss += sample_weight[i] * l;
  }
  loss /= wsum;
  double l1 = 0.0, l2 = 0.0;
  for (double v : w) {
    l1 += std::fabs(v);
    l2 += v * v;
  }
  return loss + lambda * (l1_ratio * l1 + 0.5 * (1.0 - l1_ratio) * l2);
}

namespace detail {

struct CdFitResult {
  std::vector<double> w;
  double b = 0.0;
  bool converged = false;
  int passes = 0;
};

// Cyclic proximal coordinate descent on the objective above. Each coordinate
// step is a prox-Newton update with the curvature bound sigma' <= 1/4, which
// majorizes the loss, so every pass is a descent pass.
inline CdFitResult cd_fit(const FeatureMatrix& fm, std::span<const double> y,
                          std::span<const double> omega, double lambda,
                          double l1_ratio, double tol, int max_passes) {
  const std::size_t n = fm.n_rows, p = fm.n_cols;
  double wsum = 0.0;
  for (double v : omega) wsum += v;

  CdFitResult res;
  res.w.assign(p, 0.0);
  std::vector<double> z(n, 0.0);

  // Per-coordinate curvature bounds (fixed across passes).
  std::vector<double> hj(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    const auto& col = fm.columns[j];
    double s = 0.0;
    if (col.binary) {
      for (std::uint32_t i : col.nz) s += omega[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        s += omega[i] * col.dense[i] * col.dense[i];
      }
    }
    hj[j] = 0.25 * s / wsum;
  }
  const double hb = 0.25;
  const double l1pen = lambda * l1_ratio;
  const double l2pen = lambda * (1.0 - l1_ratio);

  auto soft = [](double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
  };

  for (int pass = 0; pass < max_passes; ++pass) {
    double max_delta = 0.0;
    // intercept
    {
      double g = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        g += omega[i] * (expit(z[i]) - y[i]);
      }
      g /= wsum;
      double delta = -g / hb;
      if (delta != 0.0) {
        res.b += delta;
        for (auto& v : z) v += delta;
        max_delta = std::max(max_delta, std::fabs(delta));
      }
    }
    for (std::size_t j = 0; j < p; ++j) {
      const auto& col = fm.columns[j];
      if (hj[j] == 0.0) continue;  // constant-zero column
      double g = 0.0;
      if (col.binary) {
        for (std::uint32_t i : col.nz) {
          g += omega[i] * (expit(z[i]) - y[i]);
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          g += omega[i] * (expit(z[i]) - y[i]) * col.dense[i];
        }
      }
      g /= wsum;
      double wj = res.w[j];
      double raw = hj[j] * wj - g;
      double wn = soft(raw, l1pen) / (hj[j] + l2pen);
      double delta = wn - wj;
      if (delta != 0.0) {
        res.w[j] = wn;
        if (col.binary) {
          for (std::uint32_t i : col.nz) z[i] += delta;
        } else {
          for (std::size_t i = 0; i < n; ++i) z[i] += delta * col.dense[i];
        }
        max_delta = std::max(max_delta, std::fabs(delta));
      }
    }
    res.passes = pass + 1;
    if (max_delta < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

inline std::vector<double> class_weights(std::span<const double> y,
                                         bool balanced) {
  std::vector<double> omega(y.size(), 1.0);
  if (!balanced) return omega;
  std::size_t n1 = 0;
  for (double v : y) n1 += (v == 1.0);
  std::size_t n0 = y.size() - n1;
  if (n1 == 0 || n0 == 0) return omega;  // single class: no reweighting
  double w1 = static_cast<double>(y.size()) / (2.0 * n1);
  double w0 = static_cast<double>(y.size()) / (2.0 * n0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    omega[i] = y[i] == 1.0 ? w1 : w0;
  }
  return omega;
}

}  // namespace detail

class ElasticNetLogisticModel : public Predictor {
 public:
  ElasticNetLogisticModel(std::vector<double> w, double b, double chosen_c,
                          bool converged, int passes)
      : w_(std::move(w)), b_(b), chosen_c_(chosen_c), converged_(converged),
        passes_(passes) {}

  std::vector<double> predict_proba(const FeatureMatrix& fm) const override {
    std::vector<double> z(fm.n_rows, b_);
    std::size_t p = std::min(fm.n_cols, w_.size());
    for (std::size_t j = 0; j < p; ++j) {
      if (w_[j] == 0.0) continue;
      const auto& col = fm.columns[j];
      if (col.binary) {
        for (std::uint32_t i : col.nz) z[i] += w_[j];
      } else {
        for (std::size_t i = 0; i < fm.n_rows; ++i) {
          z[i] += w_[j] * col.dense[i];
        }
      }
    }
    for (auto& v : z) v = expit(v);
    return z;
  }

  std::string describe() const override {
    return "logistic_elastic_net(C=" + std::to_string(chosen_c_) +
           (converged_ ? "" : ",warning=max_iterations_reached") + ")";
  }

  const std::vector<double>& weights() const { return w_; }
  double intercept() const { return b_; }
  double chosen_c() const { return chosen_c_; }
  bool converged() const { return converged_; }
  int passes() const { return passes_; }

 private:
  std::vector<double> w_;
  double b_;
  double chosen_c_;
  bool converged_;
  int passes_;
};

namespace detail {

inline double mean_log_loss(std::span<const double> y,
                            std::span<const double> p) {
  const double eps = 1e-12;
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double pi = std::clamp(p[i], eps, 1.0 - eps);
    s += y[i] == 1.0 ? -std::log(pi) : -std::log(1.0 - pi);
  }
  return s / static_cast<double>(y.size());
}

// Stratified fold ids (class-wise shuffle, then round robin).
inline std::vector<int> stratified_folds(std::span<const double> y, int k,
                                         SeededRng& rng) {
  std::vector<std::size_t> ones, zeros;
  for (std::size_t i = 0; i < y.size(); ++i) {
    (y[i] == 1.0 ? ones : zeros).push_back(i);
  }
  rng.shuffle(zeros);
  rng.shuffle(ones);
  std::vector<int> fold(y.size(), 0);
  int next = 0;
  for (std::size_t i : zeros) fold[i] = next++ % k;
  for (std::size_t i : ones) fold[i] = next++ % k;
  return fold;
}

inline std::unique_ptr<ElasticNetLogisticModel> fit_elastic_net(
    const BaseLearnerSpec& spec, const FeatureMatrix& fm,
    std::span<const double> y, SeededRng& rng) {
  if (spec.regularization_grid.empty()) {
    throw Error("elastic net: regularization grid must be nonempty");
  }
  if (spec.l1_ratio < 0.0 || spec.l1_ratio > 1.0) {
    throw Error("elastic net: l1_ratio must be in [0,1]");
  }
  auto omega = class_weights(y, spec.balanced_class_weights);
  double wsum = 0.0;
  for (double v : omega) wsum += v;

  double chosen_c = spec.regularization_grid.front();
  if (spec.regularization_grid.size() > 1 &&
      fm.n_rows >= 2 * static_cast<std::size_t>(spec.inner_cv_folds)) {
    int k = spec.inner_cv_folds;
    auto fold = stratified_folds(y, k, rng);
    double best_loss = std::numeric_limits<double>::infinity();
    for (double c : spec.regularization_grid) {
      double total = 0.0;
      int used = 0;
      for (int f = 0; f < k; ++f) {
        std::vector<std::uint32_t> tr, va;
        for (std::size_t i = 0; i < fm.n_rows; ++i) {
          (fold[i] == f ? va : tr).push_back(static_cast<std::uint32_t>(i));
        }
        if (va.empty() || tr.empty()) continue;
        FeatureMatrix ftr = fm.subset(tr);
        std::vector<double> ytr(tr.size()), yva(va.size());
        for (std::size_t i = 0; i < tr.size(); ++i) ytr[i] = y[tr[i]];
        for (std::size_t i = 0; i < va.size(); ++i) yva[i] = y[va[i]];
        auto wtr = class_weights(ytr, spec.balanced_class_weights);
        double ws = 0.0;
        for (double v : wtr) ws += v;
        auto r = cd_fit(ftr, ytr, wtr, 1.0 / (c * ws), spec.l1_ratio,
                        spec.tolerance, spec.max_iterations);
        ElasticNetLogisticModel m(r.w, r.b, c, r.converged, r.passes);
        FeatureMatrix fva = fm.subset(va);
        total += mean_log_loss(yva, m.predict_proba(fva));
        ++used;
      }
      if (used == 0) continue;
      double mean = total / used;
      if (mean < best_loss - 1e-12) {
        best_loss = mean;
        chosen_c = c;
      }
    }
  }
  auto r = cd_fit(fm, y, omega, 1.0 / (chosen_c * wsum), spec.l1_ratio,
                  spec.tolerance, spec.max_iterations);
  return std::make_unique<ElasticNetLogisticModel>(
      std::move(r.w), r.b, chosen_c, r.converged, r.passes);
}

}  // namespace detail

// Stagewise boosted regression trees on the logistic loss: each round fits a
// depth-bounded tree to the gradient/hessian of the current margin and takes
// a damped Newton step per leaf.
class GradientBoostedTreesModel : public Predictor {
 public:
  struct Node {
    int feature = -1;   // -1: leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  GradientBoostedTreesModel(double f0, double lr,
                            std::vector<std::vector<Node>> trees)
      : f0_(f0), lr_(lr), trees_(std::move(trees)) {}

  std::vector<double> predict_proba(const FeatureMatrix& fm) const override {
    std::vector<double> out(fm.n_rows);
    for (std::size_t i = 0; i < fm.n_rows; ++i) {
      out[i] = expit(margin(fm, i));
    }
    return out;
  }

  double margin(const FeatureMatrix& fm, std::size_t row) const {
    double f = f0_;
    for (const auto& tree : trees_) {
      int nd = 0;
      while (tree[nd].feature >= 0) {
        nd = fm.value(row, tree[nd].feature) < tree[nd].threshold
                 ? tree[nd].left
                 : tree[nd].right;
      }
      f += lr_ * tree[nd].value;
    }
    return f;
  }

  std::string describe() const override {
    return "gbdt(trees=" + std::to_string(trees_.size()) + ")";
  }

  std::size_t n_trees() const { return trees_.size(); }

 private:
  double f0_;
  double lr_;
  std::vector<std::vector<Node>> trees_;
};

namespace detail {

inline std::unique_ptr<GradientBoostedTreesModel> fit_gbdt(
    const BaseLearnerSpec& spec, const FeatureMatrix& fm,
    std::span<const double> y) {
  using Node = GradientBoostedTreesModel::Node;
  const std::size_t n = fm.n_rows;
  const double lambda_leaf = 1.0;
  const double min_gain = 1e-12;

  double ybar = 0.0;
  for (double v : y) ybar += v;
  ybar = std::clamp(ybar / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
  double f0 = std::log(ybar / (1.0 - ybar));

  std::vector<double> margin(n, f0), grad(n), hess(n);
  std::vector<std::vector<Node>> trees;
  trees.reserve(spec.n_trees);

  auto leaf_score = [&](double g, double h) {
    return g * g / (h + lambda_leaf);
  };

  std::vector<int> row_node(n);
  struct NodeStats {
    double g = 0.0, h = 0.0;
    std::size_t cnt = 0;
  };

  for (int round = 0; round < spec.n_trees; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = expit(margin[i]);
      grad[i] = p - y[i];
      hess[i] = p * (1.0 - p);
    }

    std::vector<Node> tree(1);
    std::fill(row_node.begin(), row_node.end(), 0);
    std::vector<int> active = {0};
    std::vector<NodeStats> stats(1);
    for (std::size_t i = 0; i < n; ++i) {
      stats[0].g += grad[i];
      stats[0].h += hess[i];
      stats[0].cnt += 1;
    }

    for (int depth = 0; depth < spec.max_depth && !active.empty(); ++depth) {
      struct Best {
        double gain = 0.0;
        int feature = -1;
        double threshold = 0.0;
        double gl = 0.0, hl = 0.0;
        std::size_t cl = 0;
      };
      std::vector<Best> best(tree.size());

      // Binary columns: one pass per column accumulating the x=1 side of
      // every active node at once.
      std::vector<NodeStats> side(tree.size());
      for (std::size_t j = 0; j < fm.n_cols; ++j) {
        const auto& col = fm.columns[j];
        if (!col.binary) continue;
        for (int nd : active) side[nd] = NodeStats{};
        for (std::uint32_t i : col.nz) {
          int nd = row_node[i];
          if (nd < 0) continue;
          side[nd].g += grad[i];
          side[nd].h += hess[i];
          side[nd].cnt += 1;
        }
        for (int nd : active) {
          const auto& s1 = side[nd];
          const auto& tot = stats[nd];
          if (s1.cnt == 0 || s1.cnt == tot.cnt) continue;
          double g0 = tot.g - s1.g, h0 = tot.h - s1.h;
          double gain = leaf_score(g0, h0) + leaf_score(s1.g, s1.h) -
                        leaf_score(tot.g, tot.h);
          if (gain > best[nd].gain + min_gain) {
            best[nd] = Best{gain, static_cast<int>(j), 0.5,
                            g0, h0, tot.cnt - s1.cnt};
          }
        }
      }

      // Continuous columns: gather and sort per node.
      std::vector<std::vector<std::uint32_t>> rows_of(tree.size());
      bool any_dense = false;
      for (std::size_t j = 0; j < fm.n_cols; ++j) {
        any_dense = any_dense || !fm.columns[j].binary;
      }
      if (any_dense) {
        for (std::size_t i = 0; i < n; ++i) {
          if (row_node[i] >= 0) rows_of[row_node[i]].push_back(i);
        }
        std::vector<std::pair<double, std::uint32_t>> vals;
        for (int nd : active) {
          for (std::size_t j = 0; j < fm.n_cols; ++j) {
            const auto& col = fm.columns[j];
            if (col.binary) continue;
            vals.clear();
            vals.reserve(rows_of[nd].size());
            for (std::uint32_t i : rows_of[nd]) {
              vals.emplace_back(col.dense[i], i);
            }
            std::sort(vals.begin(), vals.end());
            double gl = 0.0, hl = 0.0;
            const auto& tot = stats[nd];
            for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
              gl += grad[vals[k].second];
              hl += hess[vals[k].second];
              if (vals[k].first == vals[k + 1].first) continue;
              double gain = leaf_score(gl, hl) +
                            leaf_score(tot.g - gl, tot.h - hl) -
                            leaf_score(tot.g, tot.h);
              if (gain > best[nd].gain + min_gain) {
                double thr = 0.5 * (vals[k].first + vals[k + 1].first);
                best[nd] = Best{gain, static_cast<int>(j), thr, gl, hl, k + 1};
              }
            }
          }
        }
      }

      std::vector<int> next_active;
      for (int nd : active) {
        if (best[nd].feature < 0) continue;
        int li = static_cast<int>(tree.size());
        tree.push_back(Node{});
        tree.push_back(Node{});
        tree[nd].feature = best[nd].feature;
        tree[nd].threshold = best[nd].threshold;
        tree[nd].left = li;
        tree[nd].right = li + 1;
        stats.resize(tree.size());
        stats[li] = NodeStats{best[nd].gl, best[nd].hl, best[nd].cl};
        stats[li + 1] =
            NodeStats{stats[nd].g - best[nd].gl, stats[nd].h - best[nd].hl,
                      stats[nd].cnt - best[nd].cl};
        next_active.push_back(li);
        next_active.push_back(li + 1);
      }
      if (next_active.empty()) break;
      for (std::size_t i = 0; i < n; ++i) {
        int nd = row_node[i];
        if (nd < 0 || tree[nd].feature < 0) continue;
        row_node[i] = fm.value(i, tree[nd].feature) < tree[nd].threshold
                          ? tree[nd].left
                          : tree[nd].right;
      }
      active = std::move(next_active);
    }

    for (std::size_t nd = 0; nd < tree.size(); ++nd) {
      if (tree[nd].feature < 0) {
        tree[nd].value = -stats[nd].g / (stats[nd].h + lambda_leaf);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      int nd = row_node[i];
      while (tree[nd].feature >= 0) {
        // only happens when a row's node was split this round
        nd = fm.value(i, tree[nd].feature) < tree[nd].threshold
                 ? tree[nd].left
                 : tree[nd].right;
      }
      margin[i] += spec.learning_rate * tree[nd].value;
    }
    trees.push_back(std::move(tree));
  }
  return std::make_unique<GradientBoostedTreesModel>(f0, spec.learning_rate,
                                                     std::move(trees));
}

}  // namespace detail

// Deterministic given (spec, data, rng seed). The rng is consumed only by
// the elastic net's inner cross-validation folds.
inline std::unique_ptr<Predictor> fit_base_learner(const BaseLearnerSpec& spec,
                                                   const FeatureMatrix& fm,
                                                   std::span<const double> y,
                                                   SeededRng& rng) {
  if (fm.n_rows == 0 || fm.n_rows != y.size()) {
    throw Error("fit_base_learner: features and labels must be nonempty and "
                "aligned");
  }
  require_binary_labels(y);
  if (spec.family == BaseLearnerSpec::Family::LogisticElasticNet) {
    return detail::fit_elastic_net(spec, fm, y, rng);
  }
  return detail::fit_gbdt(spec, fm, y);
}

}  // namespace rctbench

#endif  // RCTBENCH_LEARNERS_HPP
