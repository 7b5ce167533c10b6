#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "permchar/measures.hpp"
#include "permchar/stats.hpp"

using namespace permchar;

namespace {

// Golomb-Dickman constant, the mean largest part of PD(1):
// integral over (0, inf) of exp(-x - E_1(x)).
double golomb_dickman() {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [](double x) { return std::exp(-x - boost::math::expint(1, x)); };
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

}  // namespace

TEST(StickBreak, ForcedSticksAreDegenerate) {
  const std::vector<double> sticks{1.0, 0.3, 0.7};
  const auto y = stick_break(sticks);
  EXPECT_EQ(y[0], 1.0);
  EXPECT_EQ(y[1], 0.0);
  EXPECT_EQ(y[2], 0.0);
}

TEST(Gem, RejectsNonPositiveTheta) {
  auto g = make_rng(1, 0, Stream::weights);
  EXPECT_THROW(sample_gem(0.0, 5, g), ParameterError);
  EXPECT_THROW(sample_gem(-1.0, 5, g), ParameterError);
  EXPECT_THROW(sample_gem(1.0, 0, g), ParameterError);
}

TEST(Gem, MeansMatchResidualAllocation) {
  for (double theta : {1.0, 2.0}) {
    const int trials = 100000;
    const std::size_t J = 4;
    std::vector<std::vector<double>> draws(J);
    for (int t = 0; t < trials; ++t) {
      auto g = make_rng(17, t, Stream::weights);
      const auto y = sample_gem(theta, J, g);
      for (std::size_t j = 0; j < J; ++j) draws[j].push_back(y[j]);
    }
    for (std::size_t j = 0; j < J; ++j) {
      const double expected = (1.0 / (1.0 + theta)) * std::pow(theta / (1.0 + theta), static_cast<double>(j));
      const double se = stats::standard_error(draws[j]);
      EXPECT_NEAR(stats::mean(draws[j]), expected, 3 * se) << "theta " << theta << " j " << j + 1;
    }
  }
}

TEST(Gem, PartialSumsTelescope) {
  auto g = make_rng(5, 0, Stream::weights);
  std::vector<double> sticks(60);
  for (auto& v : sticks) v = sample_beta_one(0.8, g);
  const auto y = stick_break(sticks);
  double partial = 0.0, product = 1.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    partial += y[j];
    product *= 1.0 - sticks[j];
    EXPECT_NEAR(1.0 - partial, product, 1e-12);
    EXPECT_GT(y[j], 0.0);
  }
}

TEST(GemToPd, SortsAndReportsTail) {
  const std::vector<double> raw{0.2, 0.5, 0.1};
  const auto pd = gem_to_pd(raw, 1e-12);
  EXPECT_EQ(pd.weights.values, (std::vector<double>{0.5, 0.2, 0.1}));
  EXPECT_NEAR(pd.weights.tail_mass, 0.2, 1e-15);
  EXPECT_TRUE(pd.weights.in_nabla_prime);
  EXPECT_TRUE(pd.insufficient_depth);

  const std::vector<double> sorted{0.5, 0.3, 0.2};
  EXPECT_EQ(gem_to_pd(sorted).weights.values, sorted);

  const std::vector<double> bad{0.2, -0.1};
  EXPECT_THROW(gem_to_pd(bad), ValidationError);
}

TEST(GemToPd, LargestPartMatchesGolombDickman) {
  const double oracle = golomb_dickman();
  EXPECT_NEAR(oracle, 0.62432998854, 1e-9);
  const int trials = 100000;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    auto g = make_rng(23, t, Stream::weights);
    const auto raw = sample_gem(1.0, 200, g);
    sum += gem_to_pd(raw, 1.0).weights.values.front();
  }
  EXPECT_NEAR(sum / trials, oracle, 0.005);
}

TEST(SamplePd, InvariantsHold) {
  for (int t = 0; t < 200; ++t) {
    auto g = make_rng(3, t, Stream::weights);
    const auto w = sample_pd(t % 2 ? 0.5 : 2.0, g);
    EXPECT_NO_THROW(w.validate());
    EXPECT_TRUE(std::is_sorted(w.values.rbegin(), w.values.rend()));
    EXPECT_GE(w.tail_mass, 0.0);
    EXPECT_NEAR(w.total(), 1.0, 1e-12);
  }
}

TEST(DecayCertificate, GeometricExamples) {
  WeightVector w;
  w.values = {0.5, 0.25, 0.125};
  EXPECT_DOUBLE_EQ(fit_decay_certificate(w, 0.5).C, 1.0);
  // max over j of y_j / r^j: 2, 4 and 8.
  EXPECT_DOUBLE_EQ(fit_decay_certificate(w, 0.25).C, 8.0);
  EXPECT_THROW(fit_decay_certificate(WeightVector{}, 0.5), ValidationError);
  EXPECT_THROW(fit_decay_certificate(w, 1.0), ParameterError);
}

TEST(DecayCertificate, TightForPdSamples) {
  for (int t = 0; t < 200; ++t) {
    auto g = make_rng(8, t, Stream::weights);
    auto w = sample_pd(1.0, g, 1e-12, 400);
    const auto cert = fit_decay_certificate(w, 0.75);
    EXPECT_TRUE(std::isfinite(cert.C));
    EXPECT_TRUE(cert.holds_for(w));
    DecayCertificate lowered = cert;
    lowered.C *= 1.0 - 1e-9;
    EXPECT_FALSE(lowered.holds_for(w));
  }
}

TEST(SpaceLayout, SegmentLength) {
  auto w = geometric_weights(0.5, 0.5, 10);
  const auto layout = SpaceLayout::from(w);
  EXPECT_NEAR(layout.segment_length + w.sum() + w.tail_mass, 1.0, 1e-12);
  EXPECT_NEAR(layout.segment_sampling_length(), 1.0 - w.sum(), 1e-15);
}

TEST(SamplePoint, Degenerate) {
  WeightVector one;
  one.values = {1.0};
  one.in_nabla_prime = true;
  const auto single = SpaceLayout::from(one);
  WeightVector none;
  const auto segment = SpaceLayout::from(none);
  EXPECT_DOUBLE_EQ(segment.segment_length, 1.0);
  auto g = make_rng(2, 0, Stream::points);
  for (int i = 0; i < 1000; ++i) {
    const auto a = sample_point(single, g);
    EXPECT_EQ(a.circle, 1u);
    EXPECT_LT(a.position, 1.0);
    const auto b = sample_point(segment, g);
    EXPECT_TRUE(b.is_segment());
    EXPECT_LT(b.position, 1.0);
  }
}

TEST(SamplePoint, FrequenciesMatchPerimeters) {
  const auto w = geometric_weights(1.0, 0.5, 6);
  const auto layout = SpaceLayout::from(w);
  auto g = make_rng(4, 0, Stream::points);
  const int n = 1000000;
  std::vector<double> counts(w.size() + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto loc = sample_point(layout, g);
    if (loc.is_segment()) {
      counts.back() += 1;
      ASSERT_LT(loc.position, layout.segment_sampling_length());
    } else {
      counts[loc.circle - 1] += 1;
      ASSERT_LT(loc.position, layout.perimeter(loc.circle));
    }
  }
  EXPECT_NEAR(counts[0] / n, 0.5, 0.002);
  std::vector<double> p(w.values);
  p.push_back(layout.segment_sampling_length());
  const auto chi = stats::chi_square_test(counts, p, 5.0);
  EXPECT_GT(chi.p_value, 0.001);
}
