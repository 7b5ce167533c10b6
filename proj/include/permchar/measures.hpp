#pragma once

// Weight vectors on the Kingman simplex, stick-breaking samplers and the
// circles-plus-segment space the random permutations are grown on.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "permchar/errors.hpp"
#include "permchar/rng.hpp"

namespace permchar {

inline constexpr double kDefaultTailTol = 1e-12;
inline constexpr std::size_t kDefaultStickCap = 4096;

// A truncated, non-increasing sequence (y_1, y_2, ...) together with the mass
// that was not represented. `in_nabla_prime` marks sequences that sum to one
// once the tail is accounted for.
struct WeightVector {
  std::vector<double> values;
  double tail_mass = 0.0;
  bool in_nabla_prime = false;
  // Parameter of the sampling law, NaN when the vector was supplied directly.
  double theta = std::numeric_limits<double>::quiet_NaN();

  double sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }
  double total() const { return sum() + tail_mass; }

  // y_0: total mass carried by circles. Exactly 1 for vectors in nabla'.
  double y0() const { return in_nabla_prime ? 1.0 : total(); }

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }

  void validate() const {
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (!(values[j] >= 0.0) || values[j] > 1.0) {
        throw ValidationError("weight " + std::to_string(j) + " outside [0, 1]");
      }
      if (j + 1 < values.size() && values[j] < values[j + 1]) {
        throw ValidationError("weights are not non-increasing at index " + std::to_string(j));
      }
    }
    if (!(tail_mass >= 0.0)) throw ValidationError("negative tail mass");
    if (total() > 1.0 + 1e-12) throw ValidationError("weights sum above one");
    if (in_nabla_prime && std::abs(total() - 1.0) > 1e-12) {
      throw ValidationError("vector flagged as summing to one does not");
    }
  }
};

// values[j] <= C * r^(j+1) for every stored j.
struct DecayCertificate {
  double C = 0.0;
  double r = 0.0;

  bool holds_for(const WeightVector& w) const {
    double rj = 1.0;
    for (double v : w.values) {
      rj *= r;
      if (v > C * rj) return false;
    }
    return true;
  }
};

// Y_j = V_j * prod_{k<j} (1 - V_k) for the given sticks.
inline std::vector<double> stick_break(std::span<const double> sticks) {
  std::vector<double> out;
  out.reserve(sticks.size());
  double residual = 1.0;
  for (double v : sticks) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("stick outside [0, 1]");
    out.push_back(v * residual);
    residual *= 1.0 - v;
  }
  return out;
}

// Beta(1, theta) by inversion, V = 1 - U^(1/theta). One uniform per stick.
template <class G>
double sample_beta_one(double theta, G& g) {
  return -std::expm1(std::log(uniform_open(g)) / theta);
}

template <class G>
std::vector<double> sample_gem(double theta, std::size_t count, G& g) {
  if (!(theta > 0.0)) throw ParameterError("GEM parameter theta must be positive");
  if (count == 0) throw ParameterError("GEM sample needs at least one stick");
  std::vector<double> sticks(count);
  for (double& v : sticks) v = sample_beta_one(theta, g);
  return stick_break(sticks);
}

// Stick-breaking until the residual mass falls below tail_tol or `cap` sticks
// have been drawn. `residual` is the exact product of (1 - V_k).
struct GemDraw {
  std::vector<double> weights;
  double residual = 1.0;
};

template <class G>
GemDraw sample_gem_truncated(double theta, G& g, double tail_tol = kDefaultTailTol,
                             std::size_t cap = kDefaultStickCap) {
  if (!(theta > 0.0)) throw ParameterError("GEM parameter theta must be positive");
  GemDraw out;
  while (out.residual >= tail_tol && out.weights.size() < cap) {
    const double v = sample_beta_one(theta, g);
    out.weights.push_back(v * out.residual);
    out.residual *= 1.0 - v;
  }
  return out;
}

struct PdResult {
  WeightVector weights;
  // Set when the unrepresented mass exceeds the requested tolerance.
  bool insufficient_depth = false;
};

// Sorts a GEM sample into Poisson-Dirichlet order. Equal weights keep their
// sampling order.
inline PdResult gem_to_pd(std::span<const double> raw, double tail_tol = kDefaultTailTol) {
  double s = 0.0;
  for (double v : raw) {
    if (!(v >= 0.0)) throw ValidationError("negative GEM weight");
    s += v;
  }
  if (s > 1.0 + 1e-12) throw ValidationError("GEM weights sum above one");
  PdResult out;
  out.weights.values.assign(raw.begin(), raw.end());
  std::stable_sort(out.weights.values.begin(), out.weights.values.end(), std::greater<>());
  out.weights.tail_mass = std::max(0.0, 1.0 - out.weights.sum());
  out.weights.in_nabla_prime = true;
  out.insufficient_depth = out.weights.tail_mass > tail_tol;
  return out;
}

template <class G>
WeightVector sample_pd(double theta, G& g, double tail_tol = kDefaultTailTol,
                       std::size_t cap = kDefaultStickCap) {
  const auto draw = sample_gem_truncated(theta, g, tail_tol, cap);
  auto pd = gem_to_pd(draw.weights, std::max(tail_tol, draw.residual));
  pd.weights.theta = theta;
  return pd.weights;
}

// y_j = y0 * (1 - q) * q^(j-1), truncated at `depth` with the rest as tail.
inline WeightVector geometric_weights(double y0, double q, std::size_t depth) {
  if (!(y0 > 0.0 && y0 <= 1.0)) throw ParameterError("geometric total mass must lie in (0, 1]");
  if (!(q > 0.0 && q < 1.0)) throw ParameterError("geometric ratio must lie in (0, 1)");
  WeightVector w;
  double term = y0 * (1.0 - q);
  for (std::size_t j = 0; j < depth; ++j) {
    w.values.push_back(term);
    term *= q;
  }
  w.tail_mass = y0 * std::pow(q, static_cast<double>(depth));
  w.in_nabla_prime = (y0 == 1.0);
  return w;
}

// Smallest C with values[j] <= C r^(j+1) over the stored indices.
inline DecayCertificate fit_decay_certificate(const WeightVector& w, double r) {
  if (!(r > 0.0 && r < 1.0)) throw ParameterError("decay rate must lie in (0, 1)");
  if (w.empty()) throw ValidationError("cannot certify an empty weight vector");
  DecayCertificate cert{0.0, r};
  // Work in log space; r^(j+1) underflows long before the weights do for r near 0.
  const double log_r = std::log(r);
  double best_log = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < w.values.size(); ++j) {
    if (w.values[j] <= 0.0) continue;
    best_log = std::max(best_log, std::log(w.values[j]) - static_cast<double>(j + 1) * log_r);
  }
  cert.C = std::exp(best_log);
  // exp(log(.)) can land one ulp low; nudge up until the invariant holds.
  while (!cert.holds_for(w)) cert.C = std::nextafter(cert.C, std::numeric_limits<double>::infinity());
  return cert;
}

// Disjoint union of circles with perimeters y_j and a segment of length
// 1 - sum(y) - tail. The tail of a truncated vector is sampled as segment.
struct SpaceLayout {
  WeightVector circles;
  double segment_length = 0.0;
  std::vector<double> cumulative;  // cumulative[j] = y_1 + ... + y_{j+1}

  static SpaceLayout from(WeightVector w) {
    w.validate();
    SpaceLayout layout;
    layout.segment_length = std::max(0.0, 1.0 - w.sum() - w.tail_mass);
    layout.cumulative.resize(w.values.size());
    std::partial_sum(w.values.begin(), w.values.end(), layout.cumulative.begin());
    layout.circles = std::move(w);
    return layout;
  }

  std::size_t circle_count() const { return circles.values.size(); }
  double perimeter(std::size_t circle) const { return circles.values[circle - 1]; }
  double circle_mass() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
  // Length actually used when a point falls beyond the last circle.
  double segment_sampling_length() const { return std::max(0.0, 1.0 - circle_mass()); }
};

// A point of the space: on circle `circle` (1-based) at `position` in
// [0, perimeter), or on the segment (circle == 0) at `position`.
struct PointLocation {
  std::size_t circle = 0;
  double position = 0.0;

  static PointLocation on_circle(std::size_t j, double angle) { return {j, angle}; }
  static PointLocation on_segment(double pos) { return {0, pos}; }
  bool is_segment() const { return circle == 0; }
};

// Two uniforms per point, in this order: the first selects the component,
// the second the position inside it.
template <class G>
PointLocation sample_point(const SpaceLayout& layout, G& g) {
  const double u = uniform_half_open(g);
  const double v = uniform_half_open(g);
  const auto it = std::upper_bound(layout.cumulative.begin(), layout.cumulative.end(), u);
  if (it == layout.cumulative.end()) {
    return PointLocation::on_segment(v * layout.segment_sampling_length());
  }
  const auto j = static_cast<std::size_t>(it - layout.cumulative.begin()) + 1;
  return PointLocation::on_circle(j, v * layout.perimeter(j));
}

}  // namespace permchar
