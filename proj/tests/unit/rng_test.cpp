#include "repmon/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace repmon {
namespace {

// Reference outputs for seed 0 published with the original mix constants.
TEST(SplitMix64Test, KnownAnswerSeed0) {
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next_u64(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next_u64(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.next_u64(), 0x06c45d188009454fULL);
  EXPECT_EQ(rng.next_u64(), 0xf88bb8a8724c81ecULL);
}

TEST(SplitMix64Test, KnownAnswerSeed42) {
  SplitMix64 rng(42);
  EXPECT_EQ(rng.next_u64(), 13679457532755275413ULL);
  EXPECT_EQ(rng.next_u64(), 2949826092126892291ULL);
  EXPECT_EQ(rng.next_u64(), 5139283748462763858ULL);
  EXPECT_EQ(rng.next_u64(), 6349198060258255764ULL);
}

TEST(SplitMix64Test, DoublesMatchBitRecipe) {
  SplitMix64 rng(42);
  EXPECT_EQ(rng.next_double(), 0.7415648787718233);
  EXPECT_EQ(rng.next_double(), 0.1599103928769201);
  EXPECT_EQ(rng.next_double(), 0.27860113025513866);
}

TEST(SplitMix64Test, DoublesInUnitInterval) {
  SplitMix64 rng(9001);
  for (int i = 0; i < 20000; ++i) {
    double d = rng.next_double();
    EXPECT_GE(d, 0.0);
    EXPECT_LT(d, 1.0);
  }
}

TEST(SplitMix64Test, BernoulliEdgeCases) {
  SplitMix64 rng(5);
  for (int i = 0; i < 100; ++i) EXPECT_FALSE(rng.bernoulli(0.0));
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(rng.bernoulli(1.0));
}

TEST(SplitMix64Test, BernoulliFrequency) {
  SplitMix64 rng(17);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.3) ? 1 : 0;
  // 3-sigma band around 30000: sigma = sqrt(n * .3 * .7) ~ 145.
  EXPECT_NEAR(hits, 30000, 3 * 145);
}

TEST(SplitMix64Test, NextBelowKnownAnswers) {
  SplitMix64 rng(123);
  const std::uint64_t want[] = {4, 5, 5, 4, 4, 4, 5, 2, 3, 0, 4, 5};
  for (std::uint64_t w : want) EXPECT_EQ(rng.next_below(6), w);
}

TEST(SplitMix64Test, NextBelowBoundsAndCoverage) {
  SplitMix64 rng(31);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 30000; ++i) {
    std::uint64_t v = rng.next_below(3);
    ASSERT_LT(v, 3u);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 3 * 82);  // sigma ~ sqrt(n/3*2/3)
  for (int i = 0; i < 100; ++i) EXPECT_EQ(rng.next_below(1), 0u);
}

TEST(SplitMix64Test, ShuffleKnownOrder) {
  std::vector<int> v(10);
  std::iota(v.begin(), v.end(), 0);
  SplitMix64 rng(7);
  rng.shuffle(v);
  const std::vector<int> want = {9, 5, 8, 6, 1, 2, 4, 7, 0, 3};
  EXPECT_EQ(v, want);
}

TEST(SplitMix64Test, ShuffleIsPermutationAndDeterministic) {
  std::vector<int> a(257);
  std::iota(a.begin(), a.end(), 0);
  std::vector<int> b = a;
  SplitMix64 r1(99), r2(99);
  r1.shuffle(a);
  r2.shuffle(b);
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], static_cast<int>(i));
}

TEST(SplitMix64Test, ShuffleTrivialSizes) {
  std::vector<int> empty;
  std::vector<int> one = {42};
  SplitMix64 rng(1);
  rng.shuffle(empty);
  rng.shuffle(one);
  EXPECT_TRUE(empty.empty());
  EXPECT_EQ(one, std::vector<int>{42});
}

}  // namespace
}  // namespace repmon
