#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "glb/bags/interval_bag.hpp"
#include "glb/bags/list_bag.hpp"

namespace glb {
namespace {

using Chars = ListBag<std::uint8_t>;

TEST(ListBag, SplitGivesTrailingFloorHalf) {
  Chars bag{'a', 'b', 'c', 'd', 'e'};
  auto given = bag.split();
  ASSERT_TRUE(given);
  EXPECT_EQ(bag, (Chars{'a', 'b', 'c'}));
  EXPECT_EQ(*given, (Chars{'d', 'e'}));
}

TEST(ListBag, TooSmallToSplit) {
  Chars one{'x'};
  EXPECT_FALSE(one.split());
  EXPECT_EQ(one.size(), 1u);
  Chars none;
  EXPECT_FALSE(none.split());
}

TEST(ListBag, MergeAppendsInOrder) {
  Chars bag{'a'};
  bag.merge(Chars{'b', 'c'});
  EXPECT_EQ(bag, (Chars{'a', 'b', 'c'}));
  Chars empty;
  empty.merge(Chars{});
  EXPECT_TRUE(empty.empty());
}

TEST(ListBag, SplitMergeRoundTripPreservesMultiset) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> items(rng() % 40);
    for (auto& x : items) x = rng() % 7;
    ListBag<std::uint64_t> bag(items);
    if (auto given = bag.split()) {
      EXPECT_EQ(bag.size() + given->size(), items.size());
      bag.merge(std::move(*given));
    }
    auto got = bag.items();
    std::sort(got.begin(), got.end());
    std::sort(items.begin(), items.end());
    EXPECT_EQ(got, items);
  }
}

TEST(ListBag, WireFormat) {
  ListBag<std::uint32_t> bag{1, 0x01020304};
  Bytes out;
  ByteWriter w(out);
  bag.encode(w);
  const std::vector<int> expect{2, 0, 0, 0, 1, 0, 0, 0, 4, 3, 2, 1};
  ASSERT_EQ(out.size(), expect.size());
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(std::to_integer<int>(out[i]), expect[i]) << i;
  ByteReader r(out);
  EXPECT_EQ(ListBag<std::uint32_t>::decode(r), bag);
}

std::vector<std::uint64_t> vertices_of(const IntervalBag& b) {
  std::vector<std::uint64_t> v;
  for (const auto& iv : b.intervals())
    for (auto x = iv.low; x < iv.high; ++x) v.push_back(x);
  return v;
}

TEST(IntervalBag, PopFromFront) {
  IntervalBag bag{{0, 10}};
  EXPECT_EQ(bag.pop(3), (std::vector<std::uint64_t>{0, 1, 2}));
  ASSERT_EQ(bag.interval_count(), 1u);
  EXPECT_EQ(bag.intervals().front(), (Interval{3, 10}));
  EXPECT_EQ(bag.size(), 7u);
}

TEST(IntervalBag, PopAcrossIntervals) {
  IntervalBag bag{{0, 2}, {5, 6}};
  EXPECT_EQ(bag.pop(3), (std::vector<std::uint64_t>{0, 1, 5}));
  EXPECT_TRUE(bag.empty());
  EXPECT_EQ(bag.interval_count(), 0u);
  EXPECT_TRUE(bag.pop(5).empty());
}

TEST(IntervalBag, SuffixBalancedBisects) {
  IntervalBag bag{{0, 10}};
  auto given = bag.split();
  ASSERT_TRUE(given);
  EXPECT_EQ(bag, (IntervalBag{{0, 5}}));
  EXPECT_EQ(*given, (IntervalBag{{5, 10}}));
}

TEST(IntervalBag, SuffixBalancedTakesWholeTail) {
  IntervalBag bag{{0, 4}, {10, 13}};
  auto given = bag.split();
  ASSERT_TRUE(given);
  EXPECT_EQ(*given, (IntervalBag{{10, 13}}));
  EXPECT_EQ(bag, (IntervalBag{{0, 4}}));
}

TEST(IntervalBag, EachHalvedKeepsLowerHalves) {
  const auto s = SplitStrategy::EachHalved;
  IntervalBag bag({{0, 3}, {10, 13}}, s);
  auto given = bag.split();
  ASSERT_TRUE(given);
  EXPECT_EQ(bag, IntervalBag({{0, 1}, {10, 11}}, s));
  EXPECT_EQ(*given, IntervalBag({{1, 3}, {11, 13}}, s));
}

TEST(IntervalBag, EachHalvedSingletonsAreUnsplittable) {
  IntervalBag bag({{0, 1}, {4, 5}}, SplitStrategy::EachHalved);
  EXPECT_FALSE(bag.split());
  EXPECT_EQ(bag.size(), 2u);
  IntervalBag one{{7, 8}};
  EXPECT_FALSE(one.split());
}

TEST(IntervalBag, MergeConcatenates) {
  IntervalBag bag{{0, 5}};
  bag.merge(IntervalBag{{7, 9}});
  EXPECT_EQ(bag, (IntervalBag{{0, 5}, {7, 9}}));
  EXPECT_EQ(bag.size(), 7u);
  IntervalBag empty;
  empty.merge(IntervalBag{{3, 4}});
  EXPECT_EQ(empty, (IntervalBag{{3, 4}}));
}

TEST(IntervalBag, MergeMovesIntervalsNotVertices) {
  IntervalBag bag{{0, 1000}};
  IntervalBag incoming{{1000, 2000}, {5000, 6000}, {9000, 10000}};
  const auto before = bag.merge_moves();
  bag.merge(std::move(incoming));
  EXPECT_LE(bag.merge_moves() - before, 3u);
  EXPECT_EQ(bag.size(), 4000u);
}

TEST(IntervalBag, StrategyMismatchRejected) {
  IntervalBag a{{0, 2}};
  EXPECT_THROW(a.merge(IntervalBag({{2, 3}}, SplitStrategy::EachHalved)), ConfigError);
}

TEST(IntervalBag, EmptyIntervalsNotStored) {
  IntervalBag bag;
  bag.push_back({4, 4});
  EXPECT_EQ(bag.interval_count(), 0u);
  EXPECT_THROW(bag.push_back({5, 4}), ConfigError);
}

TEST(IntervalBag, WireFormat) {
  IntervalBag bag{{1, 2}};
  Bytes out;
  ByteWriter w(out);
  bag.encode(w);
  ASSERT_EQ(out.size(), 4u + 16u);
  EXPECT_EQ(std::to_integer<int>(out[0]), 1);
  EXPECT_EQ(std::to_integer<int>(out[4]), 1);
  EXPECT_EQ(std::to_integer<int>(out[12]), 2);
  ByteReader r(out);
  EXPECT_EQ(IntervalBag::decode(r), bag);
}

// Randomized split/merge/pop sequences: the per-vertex multiplicity is
// conserved, SuffixBalanced halves are within one, and merge moves are
// bounded by the incoming interval count.
class IntervalBagProperty : public ::testing::TestWithParam<SplitStrategy> {};

TEST_P(IntervalBagProperty, RandomSequences) {
  const auto strategy = GetParam();
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<IntervalBag> bags(3, IntervalBag(strategy));
    std::map<std::uint64_t, int> expected;  // multiplicity of each vertex across bags
    for (int k = 0; k < 4; ++k) {
      const auto low = rng() % 100;
      const auto high = low + 1 + rng() % 20;
      bags[rng() % 3].push_back({low, high});
      for (auto v = low; v < high; ++v) ++expected[v];
    }
    std::map<std::uint64_t, int> popped;
    for (int op = 0; op < 12; ++op) {
      auto& a = bags[rng() % 3];
      auto& b = bags[rng() % 3];
      switch (rng() % 3) {
        case 0: {
          const auto total = a.size();
          if (auto given = a.split()) {
            EXPECT_EQ(a.size() + given->size(), total);
            if (strategy == SplitStrategy::SuffixBalanced) {
              const auto diff = a.size() > given->size() ? a.size() - given->size() : given->size() - a.size();
              EXPECT_LE(diff, 1u);
            }
            if (&a != &b) {
              b.merge(std::move(*given));
            } else {
              a.merge(std::move(*given));
            }
          } else if (strategy == SplitStrategy::SuffixBalanced) {
            EXPECT_LT(total, 2u);
          }
          break;
        }
        case 1: {
          if (&a == &b) break;
          const auto incoming = b.interval_count();
          const auto moves = a.merge_moves();
          const auto sum = a.size() + b.size();
          a.merge(std::move(b));
          b = IntervalBag(strategy);
          EXPECT_LE(a.merge_moves() - moves, incoming);
          EXPECT_EQ(a.size(), sum);
          break;
        }
        default:
          for (auto v : a.pop(rng() % 5)) ++popped[v];
      }
      for (const auto& bag : bags)
        for (const auto& iv : bag.intervals()) ASSERT_GT(iv.size(), 0u);
    }
    std::map<std::uint64_t, int> seen = popped;
    for (const auto& bag : bags)
      for (auto v : vertices_of(bag)) ++seen[v];
    EXPECT_EQ(seen, expected);
  }
}

INSTANTIATE_TEST_SUITE_P(Strategies, IntervalBagProperty,
                         ::testing::Values(SplitStrategy::SuffixBalanced, SplitStrategy::EachHalved));

}  // namespace
}  // namespace glb
