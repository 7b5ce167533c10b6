#pragma once

// Irrational rotation numbers held as 128-bit binary fractions, so that
// {alpha * ell} and ||alpha * ell|| are exact (up to the representation error
// of alpha) for every ell below 2^40.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "permchar/errors.hpp"
#include "permchar/rng.hpp"

namespace permchar {

using u128 = unsigned __int128;

inline constexpr u128 make_u128(std::uint64_t hi, std::uint64_t lo) {
  return (static_cast<u128>(hi) << 64) | lo;
}

// frac / 2^128 as a double, rounded from the top 64 bits.
inline double fixed_to_double(u128 frac) {
  const auto hi = static_cast<std::uint64_t>(frac >> 64);
  const auto lo = static_cast<std::uint64_t>(frac);
  return std::ldexp(static_cast<double>(hi), -64) + std::ldexp(static_cast<double>(lo), -128);
}

struct Convergent {
  std::uint64_t p = 0;
  std::uint64_t q = 1;
};

// x = [0; a_1, a_2, ...] with convergents p_k / q_k.
struct ContinuedFraction {
  std::vector<std::uint64_t> quotients;
  std::vector<Convergent> convergents;
  // The expansion terminated: x is rational (to the working precision).
  bool rational = false;

  double value() const {
    if (convergents.empty()) return 0.0;
    return static_cast<double>(convergents.back().p) / static_cast<double>(convergents.back().q);
  }
};

namespace detail {

// Appends a_k and the matching convergent; false if q_k would leave 62 bits.
// Recurrence seeds (p_{-1}, q_{-1}) = (1, 0) and (p_0, q_0) = (0, 1), a_0 = 0.
inline bool push_quotient(ContinuedFraction& cf, u128 a) {
  const std::size_t k = cf.convergents.size();
  const u128 p1 = k >= 1 ? cf.convergents[k - 1].p : 0;
  const u128 q1 = k >= 1 ? cf.convergents[k - 1].q : 1;
  const u128 p2 = k >= 2 ? cf.convergents[k - 2].p : (k == 1 ? 0 : 1);
  const u128 q2 = k >= 2 ? cf.convergents[k - 2].q : (k == 1 ? 1 : 0);
  constexpr u128 limit = static_cast<u128>(1) << 62;
  if (a >= limit) return false;
  const u128 p = a * p1 + p2;
  const u128 q = a * q1 + q2;
  if (q >= limit) return false;
  cf.quotients.push_back(static_cast<std::uint64_t>(a));
  cf.convergents.push_back({static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(q)});
  return true;
}

}  // namespace detail

inline constexpr std::size_t kMaxCfDepth = 64;

// Expansion of frac / 2^128 in (0, 1). Stops early once q_k no longer fits in
// 62 bits or, flagging rationality, once q_k x is within 2^-100 of an integer
// with q_k < 2^32.
inline ContinuedFraction cf_expand(u128 frac, std::size_t depth) {
  if (frac == 0) throw ParameterError("continued fraction input must lie in (0, 1)");
  if (depth == 0 || depth > kMaxCfDepth) throw ParameterError("continued fraction depth must be in [1, 64]");
  ContinuedFraction cf;
  // Euclid on (2^128, frac); 2^128 itself does not fit, so the first step is
  // done with 2^128 - frac.
  u128 num = frac;
  u128 rem = (-frac) % frac;
  u128 a = (-frac) / frac + 1;
  while (cf.quotients.size() < depth) {
    if (!detail::push_quotient(cf, a)) break;
    if (rem == 0) {
      cf.rational = true;
      break;
    }
    // |q_k x - p_k| = rem / 2^128.
    if (rem < (static_cast<u128>(1) << 28) && cf.convergents.back().q < (1ULL << 32)) {
      cf.rational = true;
      break;
    }
    a = num / rem;
    const u128 next = num % rem;
    num = rem;
    rem = next;
  }
  return cf;
}

// Exact expansion of num / den in (0, 1).
inline ContinuedFraction cf_expand_rational(std::uint64_t num, std::uint64_t den, std::size_t depth) {
  if (num == 0 || num >= den) throw ParameterError("rational input must lie in (0, 1)");
  if (depth == 0 || depth > kMaxCfDepth) throw ParameterError("continued fraction depth must be in [1, 64]");
  ContinuedFraction cf;
  u128 a_num = den;
  u128 a_den = num;
  while (cf.quotients.size() < depth) {
    const u128 a = a_num / a_den;
    const u128 r = a_num % a_den;
    if (!detail::push_quotient(cf, a)) break;
    if (r == 0) {
      cf.rational = true;
      break;
    }
    a_num = a_den;
    a_den = r;
  }
  return cf;
}

struct AlphaFixedPoint {
  u128 frac = 0;
  ContinuedFraction cf;
  // Lower estimate of the type, at least 1.
  double type_estimate = 1.0;
  std::string name;

  double value() const { return fixed_to_double(frac); }
};

struct TypeEstimate {
  double estimate = 1.0;
  // n <= N minimizing n * ||n alpha||, and that minimum.
  std::uint64_t worst_n = 1;
  double worst_value = 0.0;
  bool rational = false;
};

inline constexpr std::uint64_t kMaxTypeScan = 1ULL << 30;
inline constexpr std::uint64_t kMaxMultiplier = 1ULL << 40;

// ||frac * ell|| in fixed point (the result is at most 2^127).
inline u128 dist_nearest_int_fixed(u128 x) {
  return (x >> 127) ? static_cast<u128>(-x) : x;
}

// Lower estimate of the type from the best approximations n <= N.
//
// The records of ||n alpha|| (the convergent denominators) satisfy
// log(1 / ||q alpha||) ~ eta * log q along the subsequence realizing the type.
// The estimate is the running maximum, over prefixes of the record list
// starting at n >= 16 and holding at least three records, of the
// least-squares slope of log(1/||q alpha||) against log q, floored at 1.
inline TypeEstimate estimate_type(const AlphaFixedPoint& alpha, std::uint64_t max_n) {
  if (max_n < 1 || max_n > kMaxTypeScan) throw RangeError("type scan bound must lie in [1, 2^30]");
  TypeEstimate out;
  out.worst_value = std::numeric_limits<double>::infinity();
  u128 acc = 0;
  u128 best = ~static_cast<u128>(0);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::uint64_t n = 1; n <= max_n; ++n) {
    acc += alpha.frac;
    const u128 d = dist_nearest_int_fixed(acc);
    if (d >= best) continue;
    best = d;
    const double dist = fixed_to_double(d);
    const double scaled = static_cast<double>(n) * dist;
    if (scaled < out.worst_value) {
      out.worst_value = scaled;
      out.worst_n = n;
    }
    if (d < (static_cast<u128>(1) << 28)) {
      out.rational = true;
      out.estimate = std::numeric_limits<double>::infinity();
      out.worst_n = n;
      out.worst_value = scaled;
      return out;
    }
    if (n < 16) continue;
    const double x = std::log(static_cast<double>(n));
    const double y = -std::log(dist);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
    if (count >= 3) {
      const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
      out.estimate = std::max(out.estimate, slope);
    }
  }
  return out;
}

inline AlphaFixedPoint alpha_from_fixed(u128 frac, std::string name = {}) {
  if (frac == 0) throw ParameterError("alpha must lie in (0, 1)");
  AlphaFixedPoint a;
  a.frac = frac;
  a.cf = cf_expand(frac, kMaxCfDepth);
  a.name = std::move(name);
  if (!a.cf.rational) a.type_estimate = estimate_type(a, 1ULL << 20).estimate;
  else a.type_estimate = std::numeric_limits<double>::infinity();
  return a;
}

// Nearest 128-bit fraction to num / den.
inline AlphaFixedPoint alpha_from_rational(std::uint64_t num, std::uint64_t den) {
  if (num == 0 || num >= den) throw ParameterError("rational alpha must lie in (0, 1)");
  // floor(num * 2^128 / den) by long division, 64 bits at a time.
  u128 r = num;
  u128 frac = 0;
  for (int i = 0; i < 2; ++i) {
    r <<= 64;
    frac = (frac << 64) | static_cast<std::uint64_t>(r / den);
    r %= den;
  }
  return alpha_from_fixed(frac, std::to_string(num) + "/" + std::to_string(den));
}

// Built-in irrationals, all of finite type: golden (= (sqrt 5 - 1)/2),
// sqrt2 (= sqrt 2 - 1), sqrt3 (= sqrt 3 - 1), e (= e - 2).
inline AlphaFixedPoint named_alpha(std::string_view name) {
  if (name == "golden") return alpha_from_fixed(make_u128(0x9e3779b97f4a7c15ULL, 0xf39cc0605cedc834ULL), "golden");
  if (name == "sqrt2") return alpha_from_fixed(make_u128(0x6a09e667f3bcc908ULL, 0xb2fb1366ea957d3eULL), "sqrt2");
  if (name == "sqrt3") return alpha_from_fixed(make_u128(0xbb67ae8584caa73bULL, 0x25742d7078b83b89ULL), "sqrt3");
  if (name == "e") return alpha_from_fixed(make_u128(0xb7e151628aed2a6aULL, 0xbf7158809cf4f3c7ULL), "e");
  throw ParameterError("unknown alpha '" + std::string(name) + "' (expected golden, sqrt2, sqrt3 or e)");
}

inline const std::vector<std::string>& builtin_alpha_names() {
  static const std::vector<std::string> names{"golden", "sqrt2", "sqrt3", "e"};
  return names;
}

// {alpha * ell} as a 128-bit fraction; wrap-around multiplication is the
// reduction mod 1.
inline u128 frac_mult_fixed(const AlphaFixedPoint& alpha, std::uint64_t ell) {
  if (ell > kMaxMultiplier) throw RangeError("multiplier above 2^40");
  return alpha.frac * static_cast<u128>(ell);
}

inline double frac_mult(const AlphaFixedPoint& alpha, std::uint64_t ell) {
  return fixed_to_double(frac_mult_fixed(alpha, ell));
}

inline double dist_nearest_int(const AlphaFixedPoint& alpha, std::uint64_t ell) {
  return fixed_to_double(dist_nearest_int_fixed(frac_mult_fixed(alpha, ell)));
}

// Exact-inversion binomial sampler over a precomputed CDF.
class BinomialSampler {
 public:
  BinomialSampler(std::uint64_t n, double p) : n_(n) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("binomial probability outside [0, 1]");
    cdf_.reserve(n + 1);
    double acc = 0.0;
    for (std::uint64_t k = 0; k <= n; ++k) {
      double pmf;
      if (p == 0.0) pmf = (k == 0) ? 1.0 : 0.0;
      else if (p == 1.0) pmf = (k == n) ? 1.0 : 0.0;
      else {
        const double dk = static_cast<double>(k);
        const double dn = static_cast<double>(n);
        pmf = std::exp(std::lgamma(dn + 1) - std::lgamma(dk + 1) - std::lgamma(dn - dk + 1) + dk * std::log(p) +
                       (dn - dk) * std::log1p(-p));
      }
      acc += pmf;
      cdf_.push_back(acc);
    }
    for (double& c : cdf_) c /= acc;
  }

  template <class G>
  std::uint64_t operator()(G& g) const {
    const double u = uniform_half_open(g);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::uint64_t>(static_cast<std::uint64_t>(it - cdf_.begin()), n_);
  }

 private:
  std::uint64_t n_;
  std::vector<double> cdf_;
};

struct SmallDenominatorResult {
  double a = 0.0;
  double empirical = 0.0;  // frequency of ell > 0 with ||alpha ell|| <= a
  double bound = 0.0;      // a^(1 / (2 nu))
};

// Frequency of small denominators ||alpha ell|| <= a for ell ~ Binomial(n, y_j),
// with one shared set of draws for every threshold in `a_grid`.
template <class G>
std::vector<SmallDenominatorResult> small_denominator_prob(double y_j, std::uint64_t n, std::span<const double> a_grid,
                                                           double nu, const AlphaFixedPoint& alpha,
                                                           std::uint64_t trials, G& g) {
  if (!(y_j >= 0.0 && y_j <= 0.5)) throw ParameterError("small-denominator check needs y_j in [0, 1/2]");
  if (!(nu > alpha.type_estimate)) throw ParameterError("nu must exceed the type estimate of alpha");
  if (trials == 0) throw ParameterError("at least one trial is required");
  const BinomialSampler binom(n, y_j);
  std::vector<std::uint64_t> hits(a_grid.size(), 0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint64_t ell = binom(g);
    if (ell == 0) continue;
    const double d = dist_nearest_int(alpha, ell);
    for (std::size_t i = 0; i < a_grid.size(); ++i) {
      if (d <= a_grid[i]) ++hits[i];
    }
  }
  std::vector<SmallDenominatorResult> out;
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    out.push_back({a_grid[i], static_cast<double>(hits[i]) / static_cast<double>(trials),
                   std::pow(a_grid[i], 1.0 / (2.0 * nu))});
  }
  return out;
}

template <class G>
SmallDenominatorResult small_denominator_prob(double y_j, std::uint64_t n, double a, double nu,
                                              const AlphaFixedPoint& alpha, std::uint64_t trials, G& g) {
  const double grid[1] = {a};
  return small_denominator_prob(y_j, n, std::span<const double>(grid), nu, alpha, trials, g).front();
}

}  // namespace permchar
