#pragma once

// Modified permutation matrices (elements of the wreath product S^1 wr S_n)
// stored column-sparse: column k has its single non-zero entry entry[k] in
// row image[k]. Indices are 0-based; cycles passed in are 1-based labels.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "permchar/errors.hpp"
#include "permchar/permutations.hpp"
#include "permchar/rng.hpp"

namespace permchar {

using Complex = std::complex<double>;

inline constexpr double kUnitTolerance = 1e-9;
inline constexpr double kEigenvalueOneTolerance = 1e-12;

class ModifiedPermMatrix {
 public:
  ModifiedPermMatrix() = default;

  static ModifiedPermMatrix build(const Permutation& p, std::span<const Complex> entries) {
    if (entries.size() != p.size()) throw ValidationError("entry count does not match permutation size");
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (std::abs(std::abs(entries[k]) - 1.0) > kUnitTolerance) {
        throw ValidationError("entry " + std::to_string(k) + " is not of unit modulus");
      }
    }
    ModifiedPermMatrix m;
    m.perm_ = p;
    m.entry_.assign(entries.begin(), entries.end());
    return m;
  }

  static ModifiedPermMatrix plain(const Permutation& p) {
    std::vector<Complex> ones(p.size(), Complex(1.0, 0.0));
    return build(p, ones);
  }

  std::size_t size() const { return perm_.size(); }
  const Permutation& permutation() const { return perm_; }
  const std::vector<std::uint32_t>& image() const { return perm_.image(); }
  const std::vector<Complex>& entry() const { return entry_; }

  // (row, column) element, 0-based.
  Complex at(std::size_t row, std::size_t col) const {
    return image()[col] == row ? entry_[col] : Complex{};
  }

  // Row-major dense copy; only meant for small oracle checks.
  std::vector<Complex> dense() const {
    const std::size_t n = size();
    std::vector<Complex> out(n * n);
    for (std::size_t col = 0; col < n; ++col) out[image()[col] * n + col] = entry_[col];
    return out;
  }

 private:
  Permutation perm_;
  std::vector<Complex> entry_;
};

template <class G>
std::vector<Complex> sample_unit_entries(std::size_t n, G& g) {
  std::vector<Complex> out(n);
  for (auto& z : out) z = uniform_unit_circle(g);
  return out;
}

// Product of the entries met along `cycle`.
inline Complex cycle_mark(const ModifiedPermMatrix& m, const Cycle& cycle) {
  if (cycle.empty()) throw ValidationError("empty cycle");
  Complex mark(1.0, 0.0);
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const auto label = cycle[i];
    if (label < 1 || label > m.size()) throw ValidationError("cycle label out of range");
    const auto expected_next = cycle[(i + 1) % cycle.size()];
    if (m.image()[label - 1] + 1 != expected_next) throw ValidationError("not a cycle of the matrix permutation");
    mark *= m.entry()[label - 1];
  }
  return mark;
}

struct MarkedCycle {
  Cycle cycle;
  Complex mark;
};

inline std::vector<MarkedCycle> cycle_marks(const ModifiedPermMatrix& m) {
  std::vector<MarkedCycle> out;
  for (auto& c : m.permutation().cycles()) {
    const Complex mark = cycle_mark(m, c);
    out.push_back({std::move(c), mark});
  }
  return out;
}

// Smallest |mark - 1| over the cycles; +inf for the empty matrix.
inline double min_distance_to_one(const ModifiedPermMatrix& m) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& mc : cycle_marks(m)) best = std::min(best, std::abs(mc.mark - 1.0));
  return best;
}

// Membership in T_n: no eigenvalue equal to one.
inline bool has_no_unit_eigenvalue(const ModifiedPermMatrix& m) {
  return min_distance_to_one(m) > kEigenvalueOneTolerance;
}

// The unique N in T_n with rank(M - diag(N, 1)) = 1. The cycle through the
// last index w_1 -> ... -> w_l -> n+1 -> w_1 is shortened to w_1 -> ... -> w_l,
// the entry of column w_l absorbing the entry of column n+1.
inline ModifiedPermMatrix project_matrix(const ModifiedPermMatrix& m) {
  const std::size_t size = m.size();
  if (size < 2) throw DomainError("projection needs a matrix of size at least two");
  if (!has_no_unit_eigenvalue(m)) throw DomainError("matrix has eigenvalue 1; projection undefined");
  const std::size_t top = size - 1;
  auto image = m.image();
  auto entry = m.entry();
  const std::uint32_t first = image[top];
  if (first != top) {
    std::size_t last = 0;
    while (image[last] != top) ++last;
    image[last] = first;
    entry[last] *= entry[top];
  }
  image.pop_back();
  entry.pop_back();
  return ModifiedPermMatrix::build(Permutation::from_image(std::move(image)), entry);
}

// X^ell. Unit-modulus arguments go through angle arithmetic so the result
// stays on the circle for large ell.
inline Complex complex_pow(Complex x, std::uint64_t ell) {
  if (ell == 0) return {1.0, 0.0};
  if (std::abs(std::abs(x) - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
    const double angle = std::fmod(static_cast<double>(ell) * std::arg(x), 2.0 * std::numbers::pi);
    return std::polar(1.0, angle);
  }
  Complex result(1.0, 0.0);
  Complex base = x;
  while (ell > 0) {
    if (ell & 1U) result *= base;
    base *= base;
    ell >>= 1U;
  }
  return result;
}

// det(X I - M) as the product over cycles of (X^len - mark).
inline Complex char_poly_eval(const ModifiedPermMatrix& m, Complex x) {
  Complex value(1.0, 0.0);
  for (const auto& mc : cycle_marks(m)) value *= complex_pow(x, mc.cycle.size()) - mc.mark;
  return value;
}

// |chi_{n+1}(X) - ratio * chi_n(X)| / (1 + |chi_{n+1}(X)|), where `smaller`
// is the projection of `larger` and the ratio is the one-step update of the
// cycle through the top index.
inline double char_poly_recursion_check(const ModifiedPermMatrix& larger, const ModifiedPermMatrix& smaller,
                                        Complex x) {
  if (larger.size() != smaller.size() + 1) throw ValidationError("matrices are not one step apart");
  const std::size_t top = larger.size() - 1;
  Cycle through_top;
  Complex mark(1.0, 0.0);
  for (std::size_t k = top;;) {
    through_top.push_back(k + 1);
    mark *= larger.entry()[k];
    k = larger.image()[k];
    if (k == top) break;
  }
  const std::size_t ell = through_top.size() - 1;
  Complex ratio;
  if (ell == 0) {
    ratio = x - mark;
  } else {
    const Complex denom = complex_pow(x, ell) - mark;
    if (std::abs(denom) < 1e-14) {
      std::ostringstream msg;
      msg << "X = " << x << " is an " << ell << "-th root of the cycle mark " << mark;
      throw DegenerateError(msg.str());
    }
    ratio = (complex_pow(x, ell + 1) - mark) / denom;
  }
  const Complex lhs = char_poly_eval(larger, x);
  const Complex rhs = ratio * char_poly_eval(smaller, x);
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

}  // namespace permchar
