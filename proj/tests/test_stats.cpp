#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "permchar/rng.hpp"
#include "permchar/stats.hpp"

using namespace permchar;

namespace {

// Dual series: P(K <= x) = sqrt(2 pi) / x * sum_k exp(-(2k - 1)^2 pi^2 / (8 x^2)).
double kolmogorov_cdf_dual(double x) {
  double s = 0.0;
  for (int k = 1; k <= 50; ++k) {
    const double m = 2.0 * k - 1.0;
    s += std::exp(-m * m * M_PI * M_PI / (8.0 * x * x));
  }
  return std::sqrt(2.0 * M_PI) / x * s;
}

}  // namespace

TEST(Kolmogorov, MatchesDualSeries) {
  for (double lambda : {0.3, 0.5, 0.8, 1.0, 1.36, 1.63, 2.0, 3.0}) {
    EXPECT_NEAR(stats::kolmogorov_sf(lambda), 1.0 - kolmogorov_cdf_dual(lambda), 1e-12) << lambda;
  }
  EXPECT_EQ(stats::kolmogorov_sf(0.0), 1.0);
  EXPECT_NEAR(stats::kolmogorov_sf(1.3581), 0.05, 1e-4);
}

TEST(Kolmogorov, TwoSampleCritical) {
  EXPECT_NEAR(stats::ks_two_sample_critical(0.05, 2000, 2000), 1.3581 * std::sqrt(2.0 / 2000), 1e-4);
  const double d = stats::ks_two_sample_critical(0.01, 500, 800);
  EXPECT_NEAR(stats::kolmogorov_sf(d * std::sqrt(500.0 * 800.0 / 1300.0)), 0.01, 1e-6);
}

TEST(KsDistance, ExactSmallCases) {
  EXPECT_DOUBLE_EQ(stats::ks_two_sample({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(stats::ks_two_sample({1, 2}, {3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(stats::ks_two_sample({1, 3}, {2, 4}), 0.5);
  EXPECT_DOUBLE_EQ(stats::ks_uniform({0.5}), 0.5);
  EXPECT_DOUBLE_EQ(stats::ks_uniform({0.25, 0.75}), 0.25);
  EXPECT_THROW(stats::ks_two_sample({}, {1}), ValidationError);
}

TEST(KsDistance, NullCalibration) {
  // Under the null, p-values are roughly uniform: about 5% fall below 0.05.
  int rejections = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    auto g = make_rng(11, r, Stream::auxiliary);
    std::vector<double> a(300), b(300);
    for (auto& x : a) x = uniform_half_open(g);
    for (auto& x : b) x = uniform_half_open(g);
    if (stats::ks_two_sample_pvalue(stats::ks_two_sample(a, b), a.size(), b.size()) < 0.05) ++rejections;
  }
  EXPECT_LT(rejections, 0.05 * reps + 4 * std::sqrt(0.05 * 0.95 * reps));
  EXPECT_GT(rejections, 0.05 * reps - 4 * std::sqrt(0.05 * 0.95 * reps));
}

TEST(ChiSquare, SurvivalMatchesBoost) {
  for (double dof : {1.0, 3.0, 10.0, 57.0}) {
    const boost::math::chi_squared_distribution<double> dist(dof);
    for (double x : {0.5, 2.0, 9.0, 40.0, 80.0}) {
      EXPECT_NEAR(stats::chi_square_sf(x, dof), boost::math::cdf(boost::math::complement(dist, x)), 1e-12);
    }
  }
  EXPECT_THROW(stats::chi_square_sf(1.0, 0.0), ParameterError);
}

TEST(ChiSquare, StatisticAndPooling) {
  const std::vector<double> obs{10, 20, 30, 40};
  const std::vector<double> p{0.25, 0.25, 0.25, 0.25};
  const auto r = stats::chi_square_test(obs, p);
  EXPECT_DOUBLE_EQ(r.statistic, (225.0 + 25.0 + 25.0 + 225.0) / 25.0);
  EXPECT_EQ(r.dof, 3.0);
  const std::vector<double> obs2{50, 48, 1, 1};
  const std::vector<double> p2{0.5, 0.48, 0.01, 0.01};
  const auto pooled = stats::chi_square_test(obs2, p2);
  EXPECT_EQ(pooled.bins, 3u);
  EXPECT_NEAR(pooled.statistic, 0.0, 1e-12);
}

TEST(Descriptive, Basics) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(stats::mean(v), 2.5);
  EXPECT_DOUBLE_EQ(stats::variance(v), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(stats::median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(stats::median({4, 1, 2, 3}), 2.5);
  EXPECT_DOUBLE_EQ(stats::quantile({0, 10}, 0.9), 9.0);
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto fit = stats::least_squares(x, y);
  EXPECT_NEAR(fit.slope, 2.0, 1e-15);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-15);
  EXPECT_NEAR(stats::correlation(x, y), 1.0, 1e-15);
}
