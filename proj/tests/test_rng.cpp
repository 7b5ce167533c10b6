#include <gtest/gtest.h>

#include <array>
#include <set>

#include "permchar/rng.hpp"

using namespace permchar;

// Known-answer vectors of Philox2x64-10 (Random123 distribution).
TEST(Philox, KnownAnswers) {
  auto zero = Philox2x64::block({0, 0}, 0);
  EXPECT_EQ(zero[0], 0xca00a0459843d731ULL);
  EXPECT_EQ(zero[1], 0x66c24222c9a845b5ULL);
  auto ones = Philox2x64::block({~0ULL, ~0ULL}, ~0ULL);
  EXPECT_EQ(ones[0], 0x65b021d60cd8310fULL);
  EXPECT_EQ(ones[1], 0x4d02f3222f86df20ULL);
  auto pi = Philox2x64::block({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL}, 0xa4093822299f31d0ULL);
  EXPECT_EQ(pi[0], 0x0a5e742c2997341cULL);
  EXPECT_EQ(pi[1], 0xb0f883d38000de5dULL);
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
  auto a = make_rng(7, 3, Stream::points);
  auto b = make_rng(7, 3, Stream::points);
  auto c = make_rng(7, 3, Stream::marks);
  auto d = make_rng(7, 4, Stream::points);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    firsts.insert(x);
  }
  EXPECT_NE(a(), c());
  EXPECT_NE(make_rng(7, 3, Stream::points)(), d());
  EXPECT_EQ(firsts.size(), 100u);
}

TEST(Philox, SeekMatchesSequentialDraws) {
  auto a = make_rng(1, 0, Stream::weights);
  std::vector<std::uint64_t> seq;
  for (int i = 0; i < 10; ++i) seq.push_back(a());
  auto b = make_rng(1, 0, Stream::weights);
  b.seek(6);
  EXPECT_EQ(b(), seq[6]);
  EXPECT_EQ(b(), seq[7]);
  b.seek(3);
  EXPECT_EQ(b(), seq[3]);
  EXPECT_EQ(b(), seq[4]);
}

TEST(Uniforms, Ranges) {
  auto g = make_rng(11, 0, Stream::auxiliary);
  double lo = 1, hi = 0, sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform_open(g);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
  EXPECT_LT(lo, 1e-4);
  EXPECT_GT(hi, 1 - 1e-4);
  for (int i = 0; i < 1000; ++i) EXPECT_NEAR(std::abs(uniform_unit_circle(g)), 1.0, 1e-15);
}
