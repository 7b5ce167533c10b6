#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "permchar/errors.hpp"

namespace permchar::stats {

// Two-sample Kolmogorov-Smirnov distance sup_x |F_a(x) - F_b(x)|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ValidationError("KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// One-sample KS distance against Uniform[0, 1).
inline double ks_uniform(std::vector<double> samples) {
  if (samples.empty()) throw ValidationError("KS test needs a non-empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = std::clamp(samples[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - x, x - static_cast<double>(i) / n});
  }
  return d;
}

// Kolmogorov distribution survival function Q(lambda) = 2 sum (-1)^(k-1) e^(-2 k^2 lambda^2).
inline double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Asymptotic p-value with the Stephens small-sample correction.
inline double ks_pvalue(double d, double effective_n) {
  const double sn = std::sqrt(effective_n);
  return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}

inline double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m) {
  return ks_pvalue(d, static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m));
}

// Asymptotic two-sample critical distance c(level) sqrt((n + m) / (n m)).
inline double ks_two_sample_critical(double level, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(level / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

inline double chi_square_sf(double statistic, double dof) {
  if (dof <= 0.0) throw ParameterError("chi-square needs positive degrees of freedom");
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  std::size_t bins = 0;
};

// Pearson chi-square of observed counts against expected probabilities. Cells
// with expected count below `min_expected` are pooled into one bin.
inline ChiSquareResult chi_square_test(std::span<const double> observed, std::span<const double> probabilities,
                                       double min_expected = 5.0) {
  if (observed.size() != probabilities.size()) throw ValidationError("chi-square cell counts differ");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  ChiSquareResult out;
  double pooled_obs = 0.0, pooled_exp = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probabilities[i] * total;
    if (e < min_expected) {
      pooled_obs += observed[i];
      pooled_exp += e;
      continue;
    }
    out.statistic += (observed[i] - e) * (observed[i] - e) / e;
    ++out.bins;
  }
  if (pooled_exp > 0.0) {
    out.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++out.bins;
  }
  if (out.bins < 2) throw ValidationError("chi-square test needs at least two bins");
  out.dof = static_cast<double>(out.bins - 1);
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

// Linear-interpolated quantile (type 7).
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ValidationError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

inline double mean(std::span<const double> v) {
  if (v.empty()) throw ValidationError("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance(std::span<const double> v) {
  if (v.size() < 2) throw ValidationError("variance needs two observations");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double standard_error(std::span<const double> v) {
  return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

inline double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("correlation needs paired samples");
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("line fit needs paired samples");
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace permchar::stats
