#pragma once

// Virtual permutations grown point by point on the circles-plus-segment space.
//
// Labels are 1-based throughout (label k is the k-th sampled point). Image
// arrays are 0-based: image[k] is the 0-based image of label k + 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "permchar/errors.hpp"
#include "permchar/measures.hpp"

namespace permchar {

using Cycle = std::vector<std::size_t>;

class Permutation {
 public:
  Permutation() = default;

  static Permutation identity(std::size_t n) {
    Permutation p;
    p.image_.resize(n);
    for (std::size_t k = 0; k < n; ++k) p.image_[k] = static_cast<std::uint32_t>(k);
    return p;
  }

  static Permutation from_image(std::vector<std::uint32_t> image) {
    std::vector<bool> seen(image.size(), false);
    for (auto v : image) {
      if (v >= image.size() || seen[v]) throw ValidationError("image is not a bijection");
      seen[v] = true;
    }
    Permutation p;
    p.image_ = std::move(image);
    return p;
  }

  // Cycles in 1-based labels; labels absent from every cycle are fixed points.
  static Permutation from_cycles(std::size_t n, const std::vector<Cycle>& cycles) {
    auto p = identity(n);
    std::vector<bool> used(n, false);
    for (const auto& c : cycles) {
      for (std::size_t i = 0; i < c.size(); ++i) {
        const auto from = c[i];
        const auto to = c[(i + 1) % c.size()];
        if (from < 1 || from > n || to < 1 || to > n) throw ValidationError("cycle label out of range");
        if (used[from - 1]) throw ValidationError("label repeated across cycles");
        used[from - 1] = true;
        p.image_[from - 1] = static_cast<std::uint32_t>(to - 1);
      }
    }
    return p;
  }

  std::size_t size() const { return image_.size(); }
  const std::vector<std::uint32_t>& image() const { return image_; }

  // sigma(label), both 1-based.
  std::size_t operator()(std::size_t label) const { return image_.at(label - 1) + 1; }

  // Canonical cycle list: each cycle starts at its smallest label, cycles
  // ordered by that label. Fixed points are included as singletons.
  std::vector<Cycle> cycles() const {
    std::vector<Cycle> out;
    std::vector<bool> seen(size(), false);
    for (std::size_t start = 0; start < size(); ++start) {
      if (seen[start]) continue;
      Cycle c;
      for (std::size_t k = start; !seen[k]; k = image_[k]) {
        seen[k] = true;
        c.push_back(k + 1);
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  std::size_t cycle_count() const {
    std::size_t count = 0;
    std::vector<bool> seen(size(), false);
    for (std::size_t start = 0; start < size(); ++start) {
      if (seen[start]) continue;
      ++count;
      for (std::size_t k = start; !seen[k]; k = image_[k]) seen[k] = true;
    }
    return count;
  }

  std::string to_string() const {
    std::string s;
    for (const auto& c : cycles()) {
      s += '(';
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(c[i]);
      }
      s += ')';
    }
    return s;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::uint32_t> image_;
};

// Deletes the largest label from its cycle.
inline Permutation remove_top(const Permutation& p) {
  const std::size_t n = p.size();
  if (n == 0) throw ValidationError("cannot remove the top element of an empty permutation");
  auto image = p.image();
  const std::uint32_t top = static_cast<std::uint32_t>(n - 1);
  const std::uint32_t after = image[top];
  if (after != top) {
    const auto pre = static_cast<std::size_t>(std::find(image.begin(), image.end(), top) - image.begin());
    image[pre] = after;
  }
  image.pop_back();
  return Permutation::from_image(std::move(image));
}

// log of theta^K(sigma) / (theta (theta + 1) ... (theta + n - 1)).
inline double ewens_log_pmf(const Permutation& p, double theta) {
  if (!(theta > 0.0)) throw ParameterError("Ewens parameter must be positive");
  double log_rising = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) log_rising += std::log(theta + static_cast<double>(i));
  return static_cast<double>(p.cycle_count()) * std::log(theta) - log_rising;
}

inline double ewens_pmf(const Permutation& p, double theta) { return std::exp(ewens_log_pmf(p, theta)); }

// Occupation numbers of the circles (ell[j] for circle j + 1) and of the segment.
struct CycleCounts {
  std::vector<std::uint64_t> ell;
  std::uint64_t p_n = 0;
  std::uint64_t n = 0;

  double y(std::size_t j) const { return static_cast<double>(ell[j]) / static_cast<double>(n); }
  std::vector<double> y_n() const {
    std::vector<double> out(ell.size());
    for (std::size_t j = 0; j < ell.size(); ++j) out[j] = y(j);
    return out;
  }
};

enum class InsertStatus { inserted, collision };

class GrowingPermutation {
 public:
  struct Point {
    std::uint32_t label;
    double angle;
  };

  GrowingPermutation() = default;
  explicit GrowingPermutation(std::size_t circle_count) : circles_(circle_count), sup_(circle_count, 0.0) {}

  std::size_t size() const { return n_; }
  std::size_t circle_count() const { return circles_.size(); }
  const std::vector<Point>& circle(std::size_t j) const { return circles_.at(j - 1); }
  const std::vector<std::uint32_t>& segment() const { return segment_; }

  // Adds label n + 1 at `loc`. A point landing exactly on an occupied angle is
  // rejected and the state is left untouched.
  InsertStatus insert(const PointLocation& loc) {
    const auto label = static_cast<std::uint32_t>(n_ + 1);
    if (loc.is_segment()) {
      segment_.push_back(label);
      where_.push_back(0);
    } else {
      if (loc.circle > circles_.size()) {
        circles_.resize(loc.circle);
        sup_.resize(loc.circle, 0.0);
      }
      auto& pts = circles_[loc.circle - 1];
      const auto it = std::lower_bound(pts.begin(), pts.end(), loc.position,
                                       [](const Point& p, double a) { return p.angle < a; });
      if (it != pts.end() && it->angle == loc.position) return InsertStatus::collision;
      pts.insert(it, Point{label, loc.position});
      where_.push_back(static_cast<std::uint32_t>(loc.circle));
    }
    ++n_;
    if (!loc.is_segment()) {
      const double frac = static_cast<double>(circles_[loc.circle - 1].size()) / static_cast<double>(n_);
      sup_[loc.circle - 1] = std::max(sup_[loc.circle - 1], frac);
    }
    return InsertStatus::inserted;
  }

  // Each label maps to the next label met counterclockwise on its circle;
  // segment labels are fixed points.
  Permutation realize() const {
    std::vector<std::uint32_t> image(n_);
    for (const auto& pts : circles_) {
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto next = pts[(i + 1) % pts.size()].label;
        image[pts[i].label - 1] = next - 1;
      }
    }
    for (auto label : segment_) image[label - 1] = label - 1;
    return Permutation::from_image(std::move(image));
  }

  CycleCounts counts() const {
    CycleCounts c;
    c.ell.resize(circles_.size());
    for (std::size_t j = 0; j < circles_.size(); ++j) c.ell[j] = circles_[j].size();
    c.p_n = segment_.size();
    c.n = n_;
    return c;
  }

  // Circle of a label (1-based), 0 for the segment.
  std::size_t circle_of(std::size_t label) const { return where_.at(label - 1); }

  // Running sup over the sizes seen so far of ell_{n,j} / n.
  const std::vector<double>& running_sup() const { return sup_; }

 private:
  std::vector<std::vector<Point>> circles_;
  std::vector<std::uint32_t> segment_;
  std::vector<std::uint32_t> where_;
  std::vector<double> sup_;
  std::size_t n_ = 0;
};

// Draws points until the state has `target` labels. Collisions are resampled;
// returns the number of resampled points.
template <class G>
std::size_t grow_to(GrowingPermutation& state, const SpaceLayout& layout, std::size_t target, G& g) {
  std::size_t resampled = 0;
  while (state.size() < target) {
    if (state.insert(sample_point(layout, g)) == InsertStatus::collision) ++resampled;
  }
  return resampled;
}

// Occupation numbers after n points, without building the permutation. Draws
// exactly the points grow_to would (collisions aside).
template <class G>
CycleCounts sample_counts(const SpaceLayout& layout, std::size_t n, G& g) {
  CycleCounts c;
  c.ell.assign(layout.circle_count(), 0);
  c.n = n;
  for (std::size_t k = 0; k < n; ++k) {
    const auto loc = sample_point(layout, g);
    if (loc.is_segment()) ++c.p_n;
    else ++c.ell[loc.circle - 1];
  }
  return c;
}

// s_j = sup over the trajectory of ell_{n,j} / n.
inline std::vector<double> running_sup(std::span<const CycleCounts> trajectory) {
  std::vector<double> s;
  for (const auto& c : trajectory) {
    if (c.ell.size() > s.size()) s.resize(c.ell.size(), 0.0);
    for (std::size_t j = 0; j < c.ell.size(); ++j) s[j] = std::max(s[j], c.y(j));
  }
  return s;
}

}  // namespace permchar
