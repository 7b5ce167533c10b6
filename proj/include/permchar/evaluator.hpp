#pragma once

// Finite-n characteristic polynomial ratios, their limiting entire functions
// and the decay diagnostics controlling the products' tails.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "permchar/diophantine.hpp"
#include "permchar/errors.hpp"
#include "permchar/measures.hpp"
#include "permchar/permutations.hpp"
#include "permchar/rng.hpp"
#include "permchar/wreath.hpp"

namespace permchar {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kLogThreshold = 0.9;
inline constexpr double kDegenerateMark = 1e-12;

// e^w - 1 without cancellation for small |w|.
inline Complex expm1(Complex w) {
  const double a = w.real(), b = w.imag();
  const double s = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

// log(1 + g) without cancellation for small |g|.
inline Complex log1p(Complex g) {
  const double x = g.real(), y = g.imag();
  return {0.5 * std::log1p(2.0 * x + x * x + y * y), std::atan2(y, 1.0 + x)};
}

// Product of factors 1 + g. Factors with |g| <= 9/10 go through log1p, the
// others are multiplied directly into a mantissa rescaled to avoid overflow.
class ProductAccumulator {
 public:
  void multiply(Complex g) {
    if (std::abs(g) <= kLogThreshold) {
      log_sum_ += log1p(g);
      return;
    }
    mantissa_ *= 1.0 + g;
    renormalize();
  }

  // (1 + g)^count.
  void multiply_power(Complex g, double count) {
    if (count == 0.0) return;
    if (std::abs(g) <= kLogThreshold) {
      log_sum_ += count * log1p(g);
      return;
    }
    const Complex f = 1.0 + g;
    if (f == Complex{}) {
      mantissa_ = 0.0;
      return;
    }
    log_sum_ += count * std::log(f);
  }

  Complex value() const {
    if (mantissa_ == Complex{}) return {};
    return mantissa_ * std::exp(log_sum_);
  }

  // log |product|; -inf when a factor vanished.
  double log_abs() const {
    if (mantissa_ == Complex{}) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(mantissa_)) + log_sum_.real();
  }

 private:
  void renormalize() {
    const double m = std::abs(mantissa_);
    if (m == 0.0 || (m < 1e100 && m > 1e-100)) return;
    log_sum_ += std::log(m);
    mantissa_ /= m;
  }

  Complex mantissa_{1.0, 0.0};
  Complex log_sum_{0.0, 0.0};
};

// u_j per circle (index j - 1) and v_k per segment point in label order, with
// v_k = e^{2 i pi phi_k}.
struct CycleMarks {
  std::vector<Complex> u;
  std::vector<Complex> v;
  std::vector<double> phi;
};

template <class G>
std::vector<Complex> sample_circle_marks(std::size_t count, G& g) {
  std::vector<Complex> out(count);
  for (auto& z : out) z = uniform_unit_circle(g);
  return out;
}

template <class G>
void extend_segment_marks(CycleMarks& marks, std::size_t count, G& g) {
  while (marks.v.size() < count) {
    const double phi = uniform_half_open(g);
    marks.phi.push_back(phi);
    marks.v.push_back(std::polar(1.0, kTwoPi * phi));
  }
}

namespace detail {

inline void check_mark(Complex mark) {
  if (std::abs(1.0 - mark) < kDegenerateMark) throw DegenerateError("cycle mark within 1e-12 of 1");
}

// expm1(2 i pi z y).
inline Complex rotation_minus_one(Complex z, double y) {
  return expm1(Complex(0.0, kTwoPi * y) * z);
}

// (e^{2 i pi z y} - u) / (1 - u) - 1.
inline Complex mark_factor(Complex z, double y, Complex u) {
  return rotation_minus_one(z, y) / (1.0 - u);
}

// (e^{2 i pi (z y + phi)} - 1) / (e^{2 i pi phi} - 1) - 1, phi in (0, 1) given
// through its fixed-point value. e^{2 i pi phi} / (e^{2 i pi phi} - 1) equals
// e^{i pi phi} / (2 i sin(pi phi)).
inline Complex alpha_factor(Complex z, double y, u128 phi_fixed) {
  const double phi = fixed_to_double(phi_fixed);
  const double d = fixed_to_double(dist_nearest_int_fixed(phi_fixed));
  const double s = std::sin(std::numbers::pi * d);
  if (!(s > 1e-300)) throw DomainError("pathological alpha: e^{2 i pi alpha ell} is numerically 1");
  const Complex ratio = std::polar(1.0, std::numbers::pi * phi) / Complex(0.0, 2.0 * s);
  return rotation_minus_one(z, y) * ratio;
}

inline std::uint64_t checked_size(const CycleCounts& c) {
  if (c.n == 0) throw ValidationError("ratio undefined at n = 0");
  std::uint64_t total = c.p_n;
  for (auto l : c.ell) total += l;
  if (total != c.n) throw ValidationError("cycle counts do not add up to n");
  return c.n;
}

}  // namespace detail

// Z~_n(e^{2 i pi z / n}) / Z~_n(1) from circle counts and marks.
inline Complex xi_tilde_n(const CycleCounts& counts, const CycleMarks& marks, Complex z) {
  const double n = static_cast<double>(detail::checked_size(counts));
  if (marks.u.size() < counts.ell.size()) throw ValidationError("missing circle marks");
  if (marks.v.size() < counts.p_n) throw ValidationError("missing segment marks");
  ProductAccumulator acc;
  for (std::size_t j = 0; j < counts.ell.size(); ++j) {
    if (counts.ell[j] == 0) continue;
    detail::check_mark(marks.u[j]);
    acc.multiply(detail::mark_factor(z, static_cast<double>(counts.ell[j]) / n, marks.u[j]));
  }
  if (counts.p_n > 0) {
    const Complex e = detail::rotation_minus_one(z, 1.0 / n);
    for (std::size_t k = 0; k < counts.p_n; ++k) {
      detail::check_mark(marks.v[k]);
      acc.multiply(e / (1.0 - marks.v[k]));
    }
  }
  return acc.value();
}

// Same ratio read off the cycles of a modified permutation matrix.
inline Complex xi_tilde_n(const ModifiedPermMatrix& m, Complex z) {
  if (m.size() == 0) throw ValidationError("ratio undefined at n = 0");
  const double n = static_cast<double>(m.size());
  ProductAccumulator acc;
  for (const auto& mc : cycle_marks(m)) {
    detail::check_mark(mc.mark);
    acc.multiply(detail::mark_factor(z, static_cast<double>(mc.cycle.size()) / n, mc.mark));
  }
  return acc.value();
}

// Z_n(e^{2 i pi (z / n + alpha)}) / Z_n(e^{2 i pi alpha}) for the plain
// permutation matrix; segment points are fixed points.
inline Complex xi_n_alpha(const CycleCounts& counts, const AlphaFixedPoint& alpha, Complex z) {
  const double n = static_cast<double>(detail::checked_size(counts));
  ProductAccumulator acc;
  for (std::size_t j = 0; j < counts.ell.size(); ++j) {
    const auto ell = counts.ell[j];
    if (ell == 0) continue;
    acc.multiply(detail::alpha_factor(z, static_cast<double>(ell) / n, frac_mult_fixed(alpha, ell)));
  }
  if (counts.p_n > 0) {
    acc.multiply_power(detail::alpha_factor(z, 1.0 / n, alpha.frac), static_cast<double>(counts.p_n));
  }
  return acc.value();
}

inline Complex xi_n_alpha(const Permutation& p, const AlphaFixedPoint& alpha, Complex z) {
  if (p.size() == 0) throw ValidationError("ratio undefined at n = 0");
  const double n = static_cast<double>(p.size());
  ProductAccumulator acc;
  for (const auto& c : p.cycles()) {
    acc.multiply(detail::alpha_factor(z, static_cast<double>(c.size()) / n, frac_mult_fixed(alpha, c.size())));
  }
  return acc.value();
}

struct LimitValue {
  Complex value;
  // Bound on |log| of the neglected tail of the product.
  double tail_bound = 0.0;
  double log_abs = 0.0;
};

inline double min_distance_to_one(std::span<const Complex> u) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : u) best = std::min(best, std::abs(1.0 - x));
  return best;
}

// 10 e^{2 pi |z|} tail_mass / min_j |1 - u_j|.
inline double tail_log_bound(const WeightVector& y, std::span<const Complex> u, Complex z) {
  if (y.tail_mass == 0.0) return 0.0;
  const double m = min_distance_to_one(u.first(std::min(u.size(), y.size())));
  return 10.0 * std::exp(kTwoPi * std::abs(z)) * y.tail_mass / m;
}

namespace detail {

inline LimitValue circle_product(const WeightVector& y, std::span<const Complex> u, Complex z) {
  if (u.size() < y.size()) throw ValidationError("missing circle marks");
  ProductAccumulator acc;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y.values[j] == 0.0) continue;
    check_mark(u[j]);
    acc.multiply(mark_factor(z, y.values[j], u[j]));
  }
  return {acc.value(), tail_log_bound(y, u, z), acc.log_abs()};
}

inline void enforce_tolerance(const LimitValue& v, double tol) {
  if (!(v.tail_bound < tol)) {
    throw TruncationError("tail bound " + std::to_string(v.tail_bound) + " not below tolerance " +
                              std::to_string(tol),
                          v.tail_bound);
  }
}

}  // namespace detail

// prod_j (e^{2 i pi z y_j} - u_j) / (1 - u_j) over the stored weights.
inline LimitValue xi_tilde_inf(const WeightVector& y, std::span<const Complex> u, Complex z,
                               double tol = std::numeric_limits<double>::infinity()) {
  auto v = detail::circle_product(y, u, z);
  detail::enforce_tolerance(v, tol);
  return v;
}

// 2 i e^{2 i pi alpha} / (e^{2 i pi alpha} - 1), which equals 1 / tan(pi alpha) + i.
inline Complex alpha_shift_coefficient(double alpha) {
  const Complex e = std::polar(1.0, kTwoPi * alpha);
  return Complex(0.0, 2.0) * e / expm1(Complex(0.0, kTwoPi * alpha));
}

inline Complex alpha_shift_coefficient_tan(double alpha) {
  return {1.0 / std::tan(std::numbers::pi * alpha), 1.0};
}

inline double circle_mass(const WeightVector& y) { return y.in_nabla_prime ? 1.0 : y.sum(); }

// Circle product times e^{i pi z (1 - y0)(1 - i / tan(pi alpha))}.
inline LimitValue xi_inf_alpha_general(const WeightVector& y, std::span<const Complex> u, const AlphaFixedPoint& alpha,
                                       Complex z, double tol = std::numeric_limits<double>::infinity()) {
  auto v = detail::circle_product(y, u, z);
  detail::enforce_tolerance(v, tol);
  const double rest = 1.0 - circle_mass(y);
  if (rest > 0.0) {
    const double t = 1.0 / std::tan(std::numbers::pi * alpha.value());
    const Complex w = Complex(0.0, std::numbers::pi * rest) * z * Complex(1.0, -t);
    v.value *= std::exp(w);
    v.log_abs += w.real();
  }
  return v;
}

// Points of a homogeneous Poisson process on [-A, A]: `negative` holds
// w_{-1} > w_{-2} > ... and `nonnegative` holds w_0 < w_1 < ...
struct PoissonPoints {
  std::vector<double> negative;
  std::vector<double> nonnegative;
  double intensity = 0.0;
  double window = 0.0;

  std::size_t size() const { return negative.size() + nonnegative.size(); }

  // w_k for k in [-negative.size(), nonnegative.size()).
  double at(std::ptrdiff_t k) const {
    return k >= 0 ? nonnegative.at(static_cast<std::size_t>(k)) : negative.at(static_cast<std::size_t>(-k - 1));
  }

  // All points in increasing order.
  std::vector<double> sorted() const {
    std::vector<double> out(negative.rbegin(), negative.rend());
    out.insert(out.end(), nonnegative.begin(), nonnegative.end());
    return out;
  }
};

// Exponential gaps walked outward from 0, positive side first.
template <class G>
PoissonPoints sample_poisson_points(double intensity, double window, G& g) {
  if (!(intensity > 0.0 && intensity <= 1.0)) throw ParameterError("Poisson intensity must lie in (0, 1]");
  if (!(window > 0.0)) throw ParameterError("Poisson window must be positive");
  PoissonPoints pts;
  pts.intensity = intensity;
  pts.window = window;
  for (double x = exponential(g, intensity); x <= window; x += exponential(g, intensity)) {
    pts.nonnegative.push_back(x);
  }
  for (double x = exponential(g, intensity); x <= window; x += exponential(g, intensity)) {
    pts.negative.push_back(-x);
  }
  return pts;
}

// (1 - z / w_0) prod_{k >= 1} (1 - z / w_k)(1 - z / w_{-k}) over the window.
inline Complex poisson_product(const PoissonPoints& pts, Complex z) {
  ProductAccumulator acc;
  const std::size_t pairs = std::max(pts.nonnegative.size(), pts.negative.size() + 1);
  for (std::size_t k = 0; k < pairs; ++k) {
    if (k < pts.nonnegative.size()) {
      const double w = pts.nonnegative[k];
      if (w == 0.0) throw DegenerateError("Poisson point at 0");
      acc.multiply(-z / w);
    }
    if (k >= 1 && k - 1 < pts.negative.size()) acc.multiply(-z / pts.negative[k - 1]);
  }
  return acc.value();
}

// Size of the pairing remainder, pi / sqrt(A).
inline double poisson_window_error(const PoissonPoints& pts) { return std::numbers::pi / std::sqrt(pts.window); }

// Circle product times e^{i pi z (1 - y0)} prod (1 - z / w_k); the Poisson
// part is 1 when y0 = 1.
inline LimitValue xi_inf_general(const WeightVector& y, std::span<const Complex> u, const PoissonPoints& pts, Complex z,
                                 double tol = std::numeric_limits<double>::infinity()) {
  auto v = detail::circle_product(y, u, z);
  detail::enforce_tolerance(v, tol);
  const double rest = 1.0 - circle_mass(y);
  if (rest > 0.0) {
    const Complex f = std::exp(Complex(0.0, std::numbers::pi * rest) * z) * poisson_product(pts, z);
    v.value *= f;
    v.log_abs += std::log(std::abs(f));
  }
  return v;
}

struct DecayDiagnostics {
  std::vector<double> m;  // m_k = min_{j <= k} |1 - u_j|
  std::vector<double> s;  // s_j, sup over n of y_j^(n), at least y_j
  double beta = 3.0;
  double C1 = 0.0;
  double rho = 0.0;
  double C2 = 0.0;
  double log_C2 = 0.0;
  double C3 = 0.0;
  double C4 = 0.0;

  // s_j <= C2 rho^j for every stored j, compared in log space.
  bool sup_bound_holds() const {
    const double log_rho = std::log(rho);
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j] == 0.0) continue;
      if (std::log(s[j]) > log_C2 + static_cast<double>(j + 1) * log_rho + 1e-12) return false;
    }
    return true;
  }

  bool finite() const {
    return std::isfinite(C1) && C1 > 0.0 && std::isfinite(C2) && std::isfinite(C3) && std::isfinite(C4);
  }
};

// `observed_sup[j]` is the running sup of ell_{n,j} / n over the simulated
// trajectory; it is raised to y_j, its limit.
inline DecayDiagnostics compute_diagnostics(const WeightVector& y, std::span<const Complex> u,
                                            std::span<const double> observed_sup, double rho, double beta = 3.0) {
  if (y.empty()) throw ValidationError("diagnostics need a non-empty weight vector");
  if (observed_sup.empty()) throw ValidationError("diagnostics need a non-empty trajectory");
  if (u.size() < y.size()) throw ValidationError("missing circle marks");
  if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("rho must lie in (0, 1)");
  DecayDiagnostics d;
  d.beta = beta;
  d.rho = rho;
  const std::size_t J = y.size();
  d.m.resize(J);
  d.s.resize(J);
  double running = std::numeric_limits<double>::infinity();
  d.C1 = 1.0;
  const double log_rho = std::log(rho);
  double best_log = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < J; ++j) {
    const double dist = std::abs(1.0 - u[j]);
    running = std::min(running, dist);
    d.m[j] = running;
    d.C1 = std::min(d.C1, running * std::pow(static_cast<double>(j + 1), beta));
    d.s[j] = std::max(j < observed_sup.size() ? observed_sup[j] : 0.0, y.values[j]);
    if (d.s[j] > 0.0) best_log = std::max(best_log, std::log(d.s[j]) - static_cast<double>(j + 1) * log_rho);
    d.C3 += y.values[j] / dist;
    d.C4 += d.s[j] / dist;
  }
  d.log_C2 = best_log;
  d.C2 = std::exp(best_log);
  return d;
}

inline DecayDiagnostics compute_diagnostics(const WeightVector& y, std::span<const Complex> u,
                                            std::span<const CycleCounts> trajectory, double rho, double beta = 3.0) {
  if (trajectory.empty()) throw ValidationError("diagnostics need a non-empty trajectory");
  const auto sup = running_sup(trajectory);
  return compute_diagnostics(y, u, sup, rho, beta);
}

// Square grid of resolution x resolution points centred at `center`.
struct Grid {
  Complex center{0.0, 0.0};
  double half_width = 2.0;
  std::size_t resolution = 9;

  std::vector<Complex> points() const {
    if (resolution < 2) throw ParameterError("grid resolution must be at least 2");
    std::vector<Complex> out;
    out.reserve(resolution * resolution);
    const double step = 2.0 * half_width / static_cast<double>(resolution - 1);
    for (std::size_t i = 0; i < resolution; ++i) {
      for (std::size_t k = 0; k < resolution; ++k) {
        out.push_back(center + Complex(-half_width + step * static_cast<double>(k),
                                       -half_width + step * static_cast<double>(i)));
      }
    }
    return out;
  }
};

struct GridValue {
  Complex z;
  Complex value;
  double tail_bound = 0.0;
};

inline std::vector<GridValue> evaluate_grid(const WeightVector& y, std::span<const Complex> u, const Grid& grid) {
  std::vector<GridValue> out;
  for (const auto& z : grid.points()) {
    const auto v = xi_tilde_inf(y, u, z);
    out.push_back({z, v.value, v.tail_bound});
  }
  return out;
}

}  // namespace permchar
