#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "rctbench/csv.hpp"
#include "rctbench/dataset.hpp"
#include "rctbench/dgp.hpp"
#include "rctbench/rng.hpp"

using namespace rctbench;

namespace {

TabularDataset small_dataset() {
  TabularDataset d;
  d.n_rows = 4;
  d.covariate_names = {"C"};
  d.covariates = {{0.0, 1.0, 0.0, 1.0}};
  d.treatment = {0, 0, 1, 1};
  d.outcome = {0.0, 1.0, 0.0, 1.0};
  return d;
}

}  // namespace

TEST(Validate, WellFormedDatasetHasNoViolations) {
  EXPECT_TRUE(validate(small_dataset()).empty());
}

TEST(Validate, NonBinaryTreatmentNamesColumnAndRow) {
  auto d = small_dataset();
  d.treatment[2] = 2;
  auto v = validate(d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].column, "T");
  ASSERT_TRUE(v[0].row.has_value());
  EXPECT_EQ(*v[0].row, 2u);
}

TEST(Validate, NanOutcomeIsReported) {
  auto d = small_dataset();
  d.outcome[1] = std::nan("");
  auto v = validate(d);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].column, "Y");
}

TEST(Validate, NanCovariateIsReported) {
  auto d = small_dataset();
  d.covariates[0][3] = std::numeric_limits<double>::infinity();
  auto v = validate(d);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].column, "C");
}

TEST(Validate, ColumnLengthMismatchIsReported) {
  auto d = small_dataset();
  d.covariates[0].pop_back();
  EXPECT_FALSE(validate(d).empty());
  EXPECT_THROW(require_valid(d), Error);
}

TEST(Validate, ProxyColumnOutOfRangeIsReported) {
  auto d = small_dataset();
  SparseBinaryMatrix m;
  m.n_rows = 4;
  m.n_cols = 3;
  m.rows = {{0}, {1, 2}, {}, {5}};
  d.proxies = m;
  auto v = validate(d);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].column, "X");
}

TEST(Summary, HandComputedArmMeans) {
  auto s = summary(small_dataset());
  ASSERT_TRUE(s.mean_outcome_control && s.mean_outcome_treated);
  EXPECT_DOUBLE_EQ(*s.mean_outcome_control, 0.5);
  EXPECT_DOUBLE_EQ(*s.mean_outcome_treated, 0.5);
  EXPECT_DOUBLE_EQ(s.treated_fraction, 0.5);
  ASSERT_EQ(s.covariate_means.size(), 1u);
  EXPECT_DOUBLE_EQ(s.covariate_means[0], 0.5);
}

TEST(Summary, AllTreatedDatasetFlagsUndefinedControlMean) {
  auto d = small_dataset();
  d.treatment = {1, 1, 1, 1};
  auto s = summary(d);
  EXPECT_FALSE(s.mean_outcome_control.has_value());
  ASSERT_TRUE(s.mean_outcome_treated.has_value());
  EXPECT_DOUBLE_EQ(s.treated_fraction, 1.0);
}

TEST(Summary, Setting1TreatedFractionNearDesign) {
  SeededRng rng(101);
  auto d = generate(dgp_setting(DgpId::Setting1, 100000), rng);
  auto s = summary(d);
  // binomial: 3 standard errors around 0.3 at n = 1e5
  EXPECT_NEAR(s.treated_fraction, 0.3, 3.0 * std::sqrt(0.3 * 0.7 / 100000));
}

TEST(SeededRng, EqualSeedsGiveIdenticalStreams) {
  SeededRng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.next_u64(), b.next_u64());
  }
  SeededRng c(42), d(42);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(c.uniform01(), d.uniform01());
    ASSERT_EQ(c.normal(), d.normal());
    ASSERT_EQ(c.uniform_index(97), d.uniform_index(97));
  }
}

TEST(SeededRng, SubstreamsAreStateIndependent) {
  SeededRng a(42);
  a.next_u64();
  a.next_u64();
  SeededRng b(42);
  // substream derivation depends only on the original seed
  EXPECT_EQ(a.substream(7).next_u64(), b.substream(7).next_u64());
  EXPECT_NE(b.substream(7).next_u64(), b.substream(8).next_u64());
}

TEST(SeededRng, Uniform01InHalfOpenUnitInterval) {
  SeededRng rng(5);
  for (int i = 0; i < 100000; ++i) {
    double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(SeededRng, BoundedIsInRangeAndRoughlyUniform) {
  SeededRng rng(6);
  std::vector<int> hist(10, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    auto v = rng.uniform_index(10);
    ASSERT_LT(v, 10u);
    hist[v]++;
  }
  for (int h : hist) {
    EXPECT_NEAR(h, n / 10, 4.0 * std::sqrt(n * 0.1 * 0.9));
  }
}

TEST(SeededRng, NormalMomentsMatchStandardNormal) {
  SeededRng rng(7);
  const int n = 1000000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 3.0 / std::sqrt(double(n)));
  EXPECT_NEAR(s2 / n, 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(SeededRng, DgpReproducibility) {
  auto setting = dgp_setting(DgpId::Setting3, 5000);
  SeededRng a(99), b(99);
  auto d1 = generate(setting, a);
  auto d2 = generate(setting, b);
  EXPECT_EQ(d1.treatment, d2.treatment);
  EXPECT_EQ(d1.outcome, d2.outcome);
  EXPECT_EQ(d1.covariates, d2.covariates);
  SeededRng c(100);
  auto d3 = generate(setting, c);
  EXPECT_NE(d1.outcome, d3.outcome);
}

TEST(GatherRows, SelectsAndRepeatsRows) {
  auto d = small_dataset();
  std::vector<std::size_t> idx = {3, 3, 0};
  auto out = select_rows(d, std::span<const std::size_t>(idx));
  ASSERT_EQ(out.n_rows, 3u);
  EXPECT_EQ(out.treatment[0], 1);
  EXPECT_EQ(out.treatment[2], 0);
  EXPECT_DOUBLE_EQ(out.covariates[0][0], 1.0);
  EXPECT_DOUBLE_EQ(out.outcome[1], 1.0);
}

TEST(RequireBothArms, SingleArmFaults) {
  auto d = small_dataset();
  d.treatment = {1, 1, 1, 1};
  EXPECT_THROW(require_both_arms(d, "test"), Error);
}

TEST(CsvRoundTrip, RandomDatasetsSurviveBitExact) {
  SeededRng rng(2024);
  for (int rep = 0; rep < 15; ++rep) {
    TabularDataset d;
    d.n_rows = 1 + rng.uniform_index(40);
    std::size_t n_cov = 1 + rng.uniform_index(3);
    for (std::size_t j = 0; j < n_cov; ++j) {
      d.covariate_names.push_back("c" + std::to_string(j));
      std::vector<double> col(d.n_rows);
      for (auto& v : col) v = rng.normal() * std::pow(10.0, rng.uniform(-3, 3));
      d.covariates.push_back(std::move(col));
    }
    d.treatment.resize(d.n_rows);
    d.outcome.resize(d.n_rows);
    for (std::size_t i = 0; i < d.n_rows; ++i) {
      d.treatment[i] = rng.bernoulli(0.5) ? 1 : 0;
      d.outcome[i] = rng.normal();
    }
    if (rep % 2 == 0) {
      SparseBinaryMatrix m;
      m.n_rows = d.n_rows;
      m.n_cols = 12;
      m.rows.resize(d.n_rows);
      for (auto& row : m.rows) {
        for (std::uint32_t c = 0; c < 12; ++c) {
          if (rng.bernoulli(0.2)) row.push_back(c);
        }
      }
      d.proxies = std::move(m);
    }
    std::string path = std::filesystem::temp_directory_path() /
                       ("rctbench_roundtrip_" + std::to_string(rep) + ".csv");
    write_dataset_csv(d, path);
    auto back = read_dataset_csv(path);
    std::filesystem::remove(path);
    ASSERT_EQ(back.n_rows, d.n_rows);
    ASSERT_EQ(back.covariate_names, d.covariate_names);
    for (std::size_t j = 0; j < d.covariates.size(); ++j) {
      for (std::size_t i = 0; i < d.n_rows; ++i) {
        ASSERT_EQ(back.covariates[j][i], d.covariates[j][i]);
      }
    }
    ASSERT_EQ(back.treatment, d.treatment);
    for (std::size_t i = 0; i < d.n_rows; ++i) {
      ASSERT_EQ(back.outcome[i], d.outcome[i]);
    }
    ASSERT_EQ(back.proxies.has_value(), d.proxies.has_value());
    if (d.proxies) {
      ASSERT_EQ(back.proxies->n_cols, d.proxies->n_cols);
      ASSERT_EQ(back.proxies->rows, d.proxies->rows);
    }
  }
}

TEST(Csv, ParserHandlesQuotingAndCrlf) {
  auto t = parse_csv("a,b,c\r\n1,\"x, \"\"y\"\"\nz\",3\n");
  ASSERT_EQ(t.header.size(), 3u);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][1], "x, \"y\"\nz");
  EXPECT_EQ(t.rows[0][2], "3");
}

TEST(Csv, RaggedRowIsAnError) {
  EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), Error);
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.123456789, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}
