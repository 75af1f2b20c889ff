#include <gtest/gtest.h>

#include <cmath>

#include "rctbench/diagnostics.hpp"
#include "rctbench/dgp.hpp"
#include "rctbench/estimators.hpp"

using namespace rctbench;

namespace {

double mean_rct_dim(DgpId id, int n_seeds, std::size_t n) {
  double acc = 0.0;
  for (int s = 0; s < n_seeds; ++s) {
    SeededRng rng(derive_seed(555, static_cast<std::uint64_t>(s)));
    auto d = generate(dgp_setting(id, n), rng);
    acc += diff_in_means(d).point_estimate;
  }
  return acc / n_seeds;
}

}  // namespace

TEST(Dgp, RctAteSetting1) {
  EXPECT_NEAR(mean_rct_dim(DgpId::Setting1, 10, 100000), 2.48, 0.05);
}

TEST(Dgp, RctAteSetting2) {
  EXPECT_NEAR(mean_rct_dim(DgpId::Setting2, 10, 100000), 2.49, 0.05);
}

TEST(Dgp, RctAteSetting3) {
  EXPECT_NEAR(mean_rct_dim(DgpId::Setting3, 10, 100000), -0.26, 0.05);
}

TEST(Dgp, ZeroRowsRejectedSingleRowWorks) {
  SeededRng rng(1);
  EXPECT_THROW(generate(dgp_setting(DgpId::Setting1, 0), rng), Error);
  auto d = generate(dgp_setting(DgpId::Setting1, 1), rng);
  ASSERT_EQ(d.n_rows, 1u);
  EXPECT_TRUE(d.treatment[0] == 0 || d.treatment[0] == 1);
  EXPECT_TRUE(validate(d).empty());
}

TEST(Dgp, UnknownSettingNameRejected) {
  EXPECT_THROW(parse_dgp_id("setting4"), Error);
  EXPECT_EQ(parse_dgp_id("setting2"), DgpId::Setting2);
}

TEST(Dgp, TrueAteFields) {
  EXPECT_DOUBLE_EQ(dgp_setting(DgpId::Setting1, 10).true_ate, 2.5);
  EXPECT_DOUBLE_EQ(dgp_setting(DgpId::Setting2, 10).true_ate, 2.5);
  EXPECT_DOUBLE_EQ(dgp_setting(DgpId::Setting3, 10).true_ate, -0.25);
}

TEST(Dgp, OracleAdjustmentTermLabels) {
  auto t1 = oracle_adjustment_terms(DgpId::Setting1);
  ASSERT_EQ(t1.size(), 2u);
  EXPECT_EQ(t1[0].label(), "C");
  EXPECT_EQ(t1[1].label(), "T*C");
  auto t3 = oracle_adjustment_terms(DgpId::Setting3);
  ASSERT_EQ(t3.size(), 4u);
  EXPECT_EQ(t3[1].label(), "T*C1*C2");
}

TEST(ConfoundingFunction, Setting1ValuesMatchDirectEvaluation) {
  auto f = dgp_confounding_function(DgpId::Setting1);
  TabularDataset d;
  d.n_rows = 2;
  d.covariate_names = {"C"};
  d.covariates = {{0.0, 1.0}};
  d.treatment = {0, 1};
  d.outcome = {0.0, 0.0};
  EXPECT_NEAR(evaluate_pstar(f, d, 0), 0.2689414213699951, 1e-12);
  EXPECT_NEAR(evaluate_pstar(f, d, 1), 0.8175744761936437, 1e-12);
}

TEST(ConfoundingFunction, ZeroCoefficientLogisticIsOneHalf) {
  auto f = ConfoundingFunction::logistic(0.0, {LogisticTerm{{"C"}, 0.0}},
                                         /*allow_trivial=*/true);
  TabularDataset d;
  d.n_rows = 1;
  d.covariate_names = {"C"};
  d.covariates = {{3.7}};
  d.treatment = {0};
  d.outcome = {0.0};
  EXPECT_DOUBLE_EQ(evaluate_pstar(f, d, 0), 0.5);
}

TEST(ConfoundingFunction, Setting3UsesAllSixTerms) {
  auto f = dgp_confounding_function(DgpId::Setting3);
  TabularDataset d;
  d.n_rows = 1;
  d.covariate_names = {"C1", "C2", "C3", "C4", "C5"};
  d.covariates = {{1.0}, {0.5}, {-1.0}, {2.0}, {0.25}};
  d.treatment = {0};
  d.outcome = {0.0};
  double z = 0.5 * 1.0 - 0.7 * 0.5 + 1.2 * (-1.0) + 1.5 * 2.0 - 1.2 * 0.25 +
             0.5 * 1.0 * 0.5;
  EXPECT_NEAR(evaluate_pstar(f, d, 0), 1.0 / (1.0 + std::exp(-z)), 1e-12);
}

TEST(Dgp, MarginalsAtLargeN) {
  SeededRng rng(4242);
  auto d1 = generate(dgp_setting(DgpId::Setting1, 1000000), rng);
  double se_t = std::sqrt(0.3 * 0.7 / 1e6);
  double se_c = std::sqrt(0.25 / 1e6);
  EXPECT_NEAR(summary(d1).treated_fraction, 0.3, 3 * se_t);
  EXPECT_NEAR(summary(d1).covariate_means[0], 0.5, 3 * se_c);

  SeededRng rng2(4243);
  auto d2 = generate(dgp_setting(DgpId::Setting2, 1000000), rng2);
  EXPECT_NEAR(summary(d2).treated_fraction, 0.5, 3 * std::sqrt(0.25 / 1e6));
}

TEST(Dgp, TreatmentIndependentOfCovariatesInRct) {
  SeededRng rng(777);
  auto d = generate(dgp_setting(DgpId::Setting1, 1000000), rng);
  std::vector<double> t(d.n_rows);
  for (std::size_t i = 0; i < d.n_rows; ++i) t[i] = d.treatment[i];
  auto orr = odds_ratio(d.covariates[0], t);
  EXPECT_LT(std::fabs(std::log(orr.value)), 3.0 * orr.log_se());
}

TEST(Dgp, CovariateOutcomeAssociationHolds) {
  // subsampling is only informative when some covariate is associated with Y
  SeededRng rng(778);
  auto d1 = generate(dgp_setting(DgpId::Setting1, 200000), rng);
  auto rep1 = check_precondition(d1);
  EXPECT_TRUE(rep1.pass);

  SeededRng rng3(779);
  auto d3 = generate(dgp_setting(DgpId::Setting3, 200000), rng3);
  auto rep3 = check_precondition(d3);
  EXPECT_TRUE(rep3.pass);
  bool c4_pass = false, c5_pass = false;
  for (const auto& pc : rep3.covariates) {
    if (pc.name == "C4") c4_pass = pc.pass;
    if (pc.name == "C5") c5_pass = pc.pass;
  }
  EXPECT_TRUE(c4_pass);
  EXPECT_TRUE(c5_pass);
}

TEST(Dgp, Setting3StructuralShapes) {
  SeededRng rng(909);
  auto d = generate(dgp_setting(DgpId::Setting3, 400000), rng);
  auto s = summary(d);
  // E[C2] = E[C1] + E[U(-0.5, 1)] = 0.75; E[C5] = 0
  EXPECT_NEAR(s.covariate_means[1], 0.75, 0.01);
  EXPECT_NEAR(s.covariate_means[4], 0.0, 0.02);
  // C2 - C1 is uniform on (-0.5, 1): bounds hold
  const auto& c1 = d.covariates[0];
  const auto& c2 = d.covariates[1];
  for (std::size_t i = 0; i < d.n_rows; i += 97) {
    double u = c2[i] - c1[i];
    ASSERT_GT(u, -0.5);
    ASSERT_LT(u, 1.0);
  }
}
