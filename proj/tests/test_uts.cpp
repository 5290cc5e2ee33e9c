#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "glb/uts.hpp"

namespace glb::uts {
namespace {

std::string hex(const Descriptor& d) {
  std::ostringstream os;
  for (auto b : d.digest) os << std::hex << std::setw(2) << std::setfill('0') << int{b};
  return os.str();
}

Descriptor from_hex(const std::string& s) {
  Descriptor d;
  for (std::size_t i = 0; i < 20; ++i) d.digest[i] = static_cast<std::uint8_t>(std::stoul(s.substr(2 * i, 2), nullptr, 16));
  return d;
}

// Expected digests computed with Python's hashlib.
TEST(Sha1, Fips180Vector) {
  const std::string abc = "abc";
  const auto d = detail::sha1({reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()});
  EXPECT_EQ(hex(d), "a9993e364706816aba3e25717850c26c9cd0d89d");
}

TEST(RootDescriptor, MatchesReferenceDigests) {
  EXPECT_EQ(hex(root_descriptor(19)), "57eaa9251a33407fcc82545443a8f191b9bd84be");
  EXPECT_EQ(hex(root_descriptor(0)), "9069ca78e7450a285173431b3e52c5c25299e473");
  EXPECT_EQ(root_descriptor(19), root_descriptor(19));
}

TEST(SpawnChild, MatchesReferenceDigests) {
  const auto root = root_descriptor(19);
  EXPECT_EQ(hex(spawn_child(root, 0)), "d97552852c71ea21d84bcea8c928f2a750929d72");
  EXPECT_EQ(hex(spawn_child(root, 1)), "2f04c0c48b23582afec1a28e37cfbe18818f9931");
  EXPECT_NE(spawn_child(root, 0), spawn_child(root, 1));
  EXPECT_EQ(spawn_child(root, 7), spawn_child(root, 7));
}

TEST(ChildCount, DepthCutoff) {
  const Params p{4.0, 19, 3};
  EXPECT_EQ(child_count(from_hex("ffffffff00000000000000000000000000000000"), 3, p), 0u);
  EXPECT_EQ(child_count(from_hex("ffffffff00000000000000000000000000000000"), 7, p), 0u);
}

TEST(ChildCount, ZeroVariateHasNoChildren) {
  const Params p{4.0, 19, 3};
  EXPECT_EQ(child_count(from_hex("0000000011111111111111111111111111111111"), 0, p), 0u);
}

TEST(ChildCount, HalfVariate) {
  // floor(ln 0.5 / ln 0.8) = floor(3.10628...) (mpmath, 50 digits)
  const Params p{4.0, 19, 3};
  EXPECT_EQ(geometric_children(0.5, 4.0), 3u);
  EXPECT_EQ(child_count(from_hex("8000000000000000000000000000000000000000"), 0, p), 3u);
}

TEST(ChildCount, SampleMeanIsB0) {
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += geometric_children((i + 0.5) / n, 4.0);
  EXPECT_NEAR(sum / n, 4.0, 0.05);
}

TEST(UtsProcess, SingleExpansionStep) {
  Queue q(Params{4.0, 19, 5});
  const auto root = root_descriptor(19);
  q.merge(Bag{{root, 0, 0, 2}});
  EXPECT_TRUE(q.process(1));
  EXPECT_EQ(q.result(), 1u);
  EXPECT_LE(q.bag().nodes().size(), 2u);
  EXPECT_EQ(q.bag().nodes().front(), (Node{root, 0, 0, 1}));
}

TEST(UtsProcess, EmptyBag) {
  Queue q(Params{});
  EXPECT_FALSE(q.process(10));
  EXPECT_EQ(q.result(), 0u);
}

TEST(UtsProcess, RunToEmptyMatchesOracle) {
  Queue q(Params{4.0, 19, 3});
  q.init();
  while (q.process(7)) {
  }
  EXPECT_EQ(q.result(), 59u);  // tests/oracles/uts_counts.py
  EXPECT_EQ(q.size(), 0u);
}

TEST(UtsProcess, NeverPushesBeyondCutoff) {
  const Params p{4.0, 19, 4};
  Queue q(p);
  q.init();
  while (q.process(1))
    for (const auto& n : q.bag().nodes()) ASSERT_LT(n.depth, p.depth);
}

TEST(UtsSplit, HalvesEachNode) {
  const auto x = root_descriptor(1);
  Bag bag{{x, 0, 0, 4}};
  auto given = bag.split();
  ASSERT_TRUE(given);
  EXPECT_EQ(bag.nodes(), (std::vector<Node>{{x, 0, 0, 2}}));
  EXPECT_EQ(given->nodes(), (std::vector<Node>{{x, 0, 2, 4}}));
}

TEST(UtsSplit, SingleChildIsNotShipped) {
  Bag bag{{root_descriptor(1), 0, 3, 4}};
  EXPECT_FALSE(bag.split());
  EXPECT_EQ(bag.size(), 1u);
}

TEST(UtsSplit, MixedNodes) {
  const auto x = root_descriptor(1), y = root_descriptor(2);
  Bag bag{{x, 0, 0, 3}, {y, 1, 5, 6}};
  auto given = bag.split();
  ASSERT_TRUE(given);
  EXPECT_EQ(bag.nodes(), (std::vector<Node>{{x, 0, 0, 1}, {y, 1, 5, 6}}));
  EXPECT_EQ(given->nodes(), (std::vector<Node>{{x, 0, 1, 3}}));
  EXPECT_EQ(bag.size(), 2u);
  EXPECT_EQ(given->size(), 2u);
}

TEST(UtsMerge, Concatenates) {
  const Node n1{root_descriptor(1), 0, 0, 1}, n2{root_descriptor(2), 1, 0, 2}, n3{root_descriptor(3), 2, 1, 4};
  Bag a;
  a.merge(Bag{n1});
  EXPECT_EQ(a.nodes(), (std::vector<Node>{n1}));
  a.merge(Bag{n2, n3});
  EXPECT_EQ(a.nodes(), (std::vector<Node>{n1, n2, n3}));
  EXPECT_EQ(a.size(), 1u + 2u + 3u);
}

std::multiset<std::pair<Descriptor, std::uint32_t>> child_slots(const Bag& b) {
  std::multiset<std::pair<Descriptor, std::uint32_t>> s;
  for (const auto& n : b.nodes())
    for (auto i = n.low; i < n.high; ++i) s.emplace(n.desc, i);
  return s;
}

TEST(UtsSplit, ConservesChildSlotsUnderRandomSplitsAndMerges) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    Bag a, b;
    for (int k = 0; k < 5; ++k) {
      const auto low = static_cast<std::uint32_t>(rng() % 5);
      a.push({root_descriptor(static_cast<std::uint32_t>(rng() % 4)), 1, low,
              low + static_cast<std::uint32_t>(rng() % 6)});
    }
    auto before = child_slots(a);
    for (int op = 0; op < 6; ++op) {
      auto& from = (rng() & 1) ? a : b;
      auto& to = (&from == &a) ? b : a;
      if (auto g = from.split()) to.merge(std::move(*g));
    }
    auto after = child_slots(a);
    auto tb = child_slots(b);
    after.insert(tb.begin(), tb.end());
    EXPECT_EQ(after, before);
  }
}

TEST(UtsBag, WireFormat) {
  const auto x = root_descriptor(19);
  Bag bag{{x, 2, 1, 3}};
  Bytes out;
  ByteWriter w(out);
  bag.encode(w);
  ASSERT_EQ(out.size(), 4u + 20u + 12u);
  EXPECT_EQ(std::to_integer<int>(out[0]), 1);
  EXPECT_EQ(std::to_integer<int>(out[4]), 0x57);
  EXPECT_EQ(std::to_integer<int>(out[24]), 2);
  EXPECT_EQ(std::to_integer<int>(out[28]), 1);
  EXPECT_EQ(std::to_integer<int>(out[32]), 3);
  ByteReader r(out);
  EXPECT_EQ(Bag::decode(r).nodes(), bag.nodes());
}

TEST(Sequential, DepthOneIsRootChildCount) {
  const Params p{4.0, 19, 1};
  EXPECT_EQ(count_sequential(p), child_count(root_descriptor(19), 0, p));
  EXPECT_EQ(count_sequential(p), 1u);
}

// Frozen from tests/oracles/uts_counts.py (hashlib + math.log).
TEST(Sequential, MatchesIndependentOracle) {
  const std::vector<std::uint64_t> expect{1, 9, 59, 295, 1199, 4844, 19437, 77614, 310339, 1245382};
  for (std::uint32_t d = 1; d <= 10; ++d) EXPECT_EQ(count_sequential(Params{4.0, 19, d}), expect[d - 1]) << d;
}

TEST(Sequential, ExpectedSizeBand) {
  for (std::uint32_t d : {6, 8, 10}) {
    const double expected = std::pow(4.0, d);
    const auto c = static_cast<double>(count_sequential(Params{4.0, 19, d}));
    EXPECT_GT(c, 0.01 * expected);
    EXPECT_LT(c, 100 * expected);
  }
}

TEST(Params, Validation) {
  EXPECT_THROW(Queue(Params{1.0, 19, 3}), ConfigError);
  EXPECT_THROW(Queue(Params{4.0, 19, 0}), ConfigError);
}

}  // namespace
}  // namespace glb::uts
