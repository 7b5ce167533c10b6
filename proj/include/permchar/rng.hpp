#pragma once

// Counter-based random streams.
//
// Every random quantity in the library is drawn from a Philox2x64-10 stream
// addressed by (key, substream). The key is derived from the user seed and the
// trial index, the substream names the purpose of the draws (weights, points,
// marks, ...). Because the counter is explicit, a trial's numbers do not depend
// on which thread runs it or on how many draws other trials consumed.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

namespace permchar {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Philox2x64 with 10 rounds (Salmon et al., Random123).
class Philox2x64 {
 public:
  using result_type = std::uint64_t;
  using counter_type = std::array<std::uint64_t, 2>;

  static constexpr std::uint64_t kMultiplier = 0xD2B74407B1CE6E93ULL;
  static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;

  constexpr Philox2x64() noexcept = default;
  constexpr Philox2x64(std::uint64_t key, std::uint64_t substream) noexcept
      : key_(key), substream_(substream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  static constexpr counter_type block(counter_type ctr, std::uint64_t key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) key += kWeyl;
      const unsigned __int128 prod = static_cast<unsigned __int128>(kMultiplier) * ctr[0];
      const auto hi = static_cast<std::uint64_t>(prod >> 64);
      const auto lo = static_cast<std::uint64_t>(prod);
      ctr = {hi ^ key ^ ctr[1], lo};
    }
    return ctr;
  }

  result_type operator()() noexcept {
    if (lane_ == 2) {
      buffer_ = block({counter_, substream_}, key_);
      ++counter_;
      lane_ = 0;
    }
    return buffer_[lane_++];
  }

  // Jump to an absolute position in the stream (in 64-bit outputs).
  void seek(std::uint64_t position) noexcept {
    counter_ = position / 2;
    lane_ = 2;
    if (position % 2 == 1) {
      (*this)();
    }
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t substream() const noexcept { return substream_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t substream_ = 0;
  std::uint64_t counter_ = 0;
  counter_type buffer_{};
  int lane_ = 2;
};

using Rng = Philox2x64;

// Substream identifiers. Their numeric values are part of the reproducibility
// contract and must not be renumbered.
enum class Stream : std::uint64_t {
  weights = 1,
  points = 2,
  marks = 3,
  segment_marks = 4,
  poisson = 5,
  entries = 6,
  auxiliary = 7,
};

inline constexpr std::uint64_t trial_key(std::uint64_t seed, std::uint64_t trial) noexcept {
  return splitmix64(seed ^ splitmix64(trial + 0x632BE59BD9B4E019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t trial, Stream stream) noexcept {
  return Rng(trial_key(seed, trial), static_cast<std::uint64_t>(stream));
}

// Uniform on the open interval (0, 1); 53 random bits.
template <class G>
double uniform_open(G& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1p-53;
}

// Uniform on [0, 1).
template <class G>
double uniform_half_open(G& g) {
  return static_cast<double>(g() >> 11) * 0x1p-53;
}

template <class G>
double exponential(G& g, double rate) {
  return -std::log(uniform_open(g)) / rate;
}

template <class G>
std::complex<double> uniform_unit_circle(G& g) {
  return std::polar(1.0, 2.0 * std::numbers::pi * uniform_half_open(g));
}

}  // namespace permchar
