#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "glb/fib.hpp"
#include "glb/glb.hpp"
#include "glb/runtime.hpp"
#include "glb/uts.hpp"
#include "glb/worker.hpp"

namespace glb {
namespace {

std::vector<int> ints(const Bytes& b) {
  std::vector<int> out;
  for (auto x : b) out.push_back(std::to_integer<int>(x));
  return out;
}

TEST(SpawnPlaces, SinglePlaceDeterministic) {
  auto g = spawn_places(1, SchedulerMode::Deterministic, 0);
  EXPECT_EQ(g->size(), 1u);
  EXPECT_TRUE(g->mailbox_empty(0));
  EXPECT_TRUE(g->quiescent());
}

TEST(SpawnPlaces, ParallelGroupStartsIdle) {
  auto g = spawn_places(8, SchedulerMode::Parallel, 7);
  EXPECT_EQ(g->size(), 8u);
  for (PlaceId p = 0; p < 8; ++p) {
    EXPECT_TRUE(g->idle(p));
    EXPECT_TRUE(g->mailbox_empty(p));
  }
}

TEST(SpawnPlaces, ZeroPlacesRejected) {
  EXPECT_THROW(spawn_places(0, SchedulerMode::Deterministic, 0), ConfigError);
}

TEST(Send, PayloadIsAValueCopy) {
  PlaceGroup g(2, SchedulerMode::Deterministic, 0);
  Deal deal{StealKind::Random, Bytes{std::byte{1}, std::byte{2}}};
  g.send(0, 1, deal);
  deal.bag[0] = std::byte{9};
  auto env = g.try_receive(1);
  ASSERT_TRUE(env);
  EXPECT_EQ(env->src, 0u);
  EXPECT_EQ(env->dst, 1u);
  auto msg = std::get<Deal>(env->message());
  EXPECT_EQ(ints(msg.bag), (std::vector<int>{1, 2}));
}

TEST(Send, FifoPerPair) {
  PlaceGroup g(2, SchedulerMode::Deterministic, 0);
  g.send(0, 1, NoWork{StealKind::Random});
  g.send(0, 1, StealRequest{0, StealKind::Lifeline});
  auto a = g.try_receive(1);
  auto b = g.try_receive(1);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->seq, 0u);
  EXPECT_EQ(b->seq, 1u);
  EXPECT_TRUE(std::holds_alternative<NoWork>(a->message()));
  EXPECT_TRUE(std::holds_alternative<StealRequest>(b->message()));
  EXPECT_FALSE(g.try_receive(1));
}

TEST(Send, ToSelf) {
  PlaceGroup g(1, SchedulerMode::Deterministic, 0);
  g.send(0, 0, NoWork{});
  EXPECT_EQ(g.pending(0), 1u);
  EXPECT_TRUE(g.try_receive(0));
  EXPECT_EQ(g.sent(0, 0), g.delivered(0, 0));
}

TEST(Send, RoutingError) {
  PlaceGroup g(2, SchedulerMode::Deterministic, 0);
  EXPECT_THROW(g.send(0, 2, NoWork{}), ProtocolError);
}

TEST(Send, ConcurrentSendersStayOrdered) {
  PlaceGroup g(5, SchedulerMode::Parallel, 0);
  constexpr int kPerSender = 2000;
  {
    std::vector<std::jthread> senders;
    for (PlaceId s = 1; s < 5; ++s)
      senders.emplace_back([&, s] {
        for (int i = 0; i < kPerSender; ++i) g.send(s, 0, StealRequest{s, StealKind::Random});
      });
  }
  std::vector<std::uint64_t> next(5, 0);
  while (auto env = g.try_receive(0)) {
    EXPECT_EQ(env->seq, next[env->src]++);
  }
  for (PlaceId s = 1; s < 5; ++s) {
    EXPECT_EQ(next[s], std::uint64_t{kPerSender});
    EXPECT_EQ(g.sent(s, 0), g.delivered(s, 0));
  }
  EXPECT_EQ(g.total_sent(), g.total_delivered());
}

TEST(Quiescent, InFlightEnvelopeBlocksIt) {
  PlaceGroup g(2, SchedulerMode::Deterministic, 0);
  EXPECT_TRUE(g.quiescent());
  g.send(0, 1, NoWork{});
  EXPECT_FALSE(g.quiescent());
  g.try_receive(1);
  EXPECT_TRUE(g.quiescent());
}

TEST(Quiescent, ActivePlaceBlocksIt) {
  PlaceGroup g(2, SchedulerMode::Deterministic, 0);
  g.set_idle(1, false);
  EXPECT_FALSE(g.quiescent());
}

TEST(EnvelopeEncoding, StealRequestBitExact) {
  const auto b = encode_message(StealRequest{3, StealKind::Lifeline});
  EXPECT_EQ(ints(b), (std::vector<int>{6, 0, 0, 0, 1, 3, 0, 0, 0, 1}));
}

TEST(EnvelopeEncoding, NoWorkAndPushBitExact) {
  EXPECT_EQ(ints(encode_message(NoWork{StealKind::Lifeline})), (std::vector<int>{2, 0, 0, 0, 3, 1}));
  EXPECT_EQ(ints(encode_message(LifelinePush{Bytes{std::byte{7}}})), (std::vector<int>{2, 0, 0, 0, 4, 7}));
  EXPECT_EQ(ints(encode_message(Deal{StealKind::Random, Bytes{std::byte{7}}})),
            (std::vector<int>{3, 0, 0, 0, 2, 0, 7}));
}

TEST(EnvelopeEncoding, RandomMessagesRoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    Bytes bag(rng() % 16);
    for (auto& x : bag) x = static_cast<std::byte>(rng());
    const auto kind = static_cast<StealKind>(rng() % 2);
    Message m;
    switch (rng() % 4) {
      case 0: m = StealRequest{static_cast<PlaceId>(rng() % 1000), kind}; break;
      case 1: m = Deal{kind, bag}; break;
      case 2: m = NoWork{kind}; break;
      default: m = LifelinePush{bag};
    }
    EXPECT_EQ(decode_message(encode_message(m)), m);
  }
}

TEST(EnvelopeEncoding, MalformedPayloadsRejected) {
  auto b = encode_message(NoWork{});
  b[0] = std::byte{9};
  EXPECT_THROW(decode_message(b), ProtocolError);
  Bytes bad_tag{std::byte{1}, std::byte{0}, std::byte{0}, std::byte{0}, std::byte{42}};
  EXPECT_THROW(decode_message(bad_tag), ProtocolError);
  Bytes bad_kind{std::byte{2}, std::byte{0}, std::byte{0}, std::byte{0}, std::byte{3}, std::byte{5}};
  EXPECT_THROW(decode_message(bad_kind), ProtocolError);
  EXPECT_THROW(decode_message(Bytes{std::byte{1}}), ProtocolError);
}

std::vector<Worker<FibQueue>> fib_workers(PlaceGroup& g, const GlbConfig& c, std::uint64_t seed_n, bool seed) {
  std::vector<Worker<FibQueue>> ws;
  for (PlaceId p = 0; p < c.places; ++p) {
    FibQueue q;
    if (p == 0 && seed) q.init(seed_n);
    ws.emplace_back(p, c, g, std::move(q));
  }
  return ws;
}

std::uint64_t fold(const std::vector<Worker<FibQueue>>& ws) {
  std::uint64_t r = 0;
  for (const auto& w : ws) r += w.queue().result();
  return r;
}

TEST(RunUntilQuiescent, NoWorkReturnsImmediately) {
  for (auto mode : {SchedulerMode::Deterministic, SchedulerMode::Parallel}) {
    auto c = GlbConfig::defaults(4, mode);
    PlaceGroup g(4, mode, 0);
    auto ws = fib_workers(g, c, 0, false);
    run_until_quiescent(g, ws);
    EXPECT_EQ(fold(ws), 0u);
    EXPECT_TRUE(g.quiescent());
  }
}

TEST(RunUntilQuiescent, Fib20OnFourPlaces) {
  for (auto mode : {SchedulerMode::Deterministic, SchedulerMode::Parallel}) {
    auto c = GlbConfig::defaults(4, mode, 3);
    c.granularity = 8;
    PlaceGroup g(4, mode, 3);
    auto ws = fib_workers(g, c, 20, true);
    run_until_quiescent(g, ws);
    EXPECT_EQ(fold(ws), 6765u);
    EXPECT_EQ(g.total_sent(), g.total_delivered());
  }
}

TEST(RunUntilQuiescent, UtsDepth8OnTwoPlaces) {
  const uts::Params params{4.0, 19, 8};
  for (auto mode : {SchedulerMode::Deterministic, SchedulerMode::Parallel}) {
    auto c = GlbConfig::defaults(2, mode, 1);
    auto r = run(c, [&](PlaceId) { return uts::Queue(params); },
                 std::function<void(uts::Queue&)>([](uts::Queue& q) { q.init(); }));
    EXPECT_EQ(r.value, 77614u);  // tests/oracles/uts_counts.py
    EXPECT_TRUE(r.mailboxes_empty);
  }
}

TEST(RunUntilQuiescent, WorkersMustMatchPlaces) {
  auto c = GlbConfig::defaults(2);
  PlaceGroup g(2, SchedulerMode::Deterministic, 0);
  PlaceGroup other(3, SchedulerMode::Deterministic, 0);
  auto ws = fib_workers(g, c, 1, true);
  EXPECT_THROW(run_until_quiescent(other, ws), ConfigError);
}

TEST(DeterministicReplay, IdenticalTraces) {
  auto trace_of = [](std::uint64_t seed) {
    auto c = GlbConfig::defaults(4, SchedulerMode::Deterministic, seed);
    c.granularity = 4;
    c.trace = true;
    return run(c, [](PlaceId) { return FibQueue(); },
               std::function<void(FibQueue&)>([](FibQueue& q) { q.init(15); }));
  };
  const auto a = trace_of(5);
  const auto b = trace_of(5);
  EXPECT_FALSE(a.trace.empty());
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.trace_hash, b.trace_hash);
  EXPECT_EQ(a.value, 610u);
}

TEST(Quiescent, StableOnceReached) {
  auto c = GlbConfig::defaults(3, SchedulerMode::Deterministic, 2);
  PlaceGroup g(3, SchedulerMode::Deterministic, 2);
  auto ws = fib_workers(g, c, 12, true);
  run_until_quiescent(g, ws);
  ASSERT_TRUE(g.quiescent());
  for (int round = 0; round < 5; ++round) {
    for (auto& w : ws) w.step();
    EXPECT_TRUE(g.quiescent());
  }
}

}  // namespace
}  // namespace glb
