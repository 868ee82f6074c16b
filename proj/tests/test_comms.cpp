#include <gtest/gtest.h>

#include "tunnelswarm/comms.hpp"
#include "tunnelswarm/degradation.hpp"
#include "tunnelswarm/rng.hpp"

using namespace tunnelswarm;

namespace {

CommsNode node(double x, double y = 0.0, double range = 2.5, bool alive = true) {
  return {{x, y}, {x, y}, range, alive};
}

const Beacon kFarBeacon{{100.0, 100.0}, 2.5};

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n + 1, 0.0); }

}  // namespace

TEST(Contacts, PeerInRange) {
  const std::vector<CommsNode> nodes{node(0.0), node(1.0)};
  const auto c = ultrasonic_contacts(0, nodes, kFarBeacon, zeros(2));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].peer, 1);
  EXPECT_NEAR(c[0].measured, 1.0, 1e-12);
  EXPECT_NEAR(c[0].true_range, 1.0, 1e-12);
}

TEST(Contacts, DegradedEmitterOutOfReach) {
  const double dc = 0.3465;
  ASSERT_NEAR(sensing_range(dc), 1.5, 1e-3);
  const std::vector<CommsNode> nodes{node(0.0), node(2.2, 0.0, sensing_range(dc))};
  EXPECT_TRUE(ultrasonic_contacts(0, nodes, kFarBeacon, zeros(2)).empty());
  // The degraded robot still hears the healthy one.
  EXPECT_EQ(ultrasonic_contacts(1, nodes, kFarBeacon, zeros(2)).size(), 1u);
}

TEST(Contacts, MeasurementNoise) {
  const std::vector<CommsNode> nodes{node(0.0), node(1.0)};
  std::vector<double> draws{0.0, 1.0, 0.0};
  const auto c = ultrasonic_contacts(0, nodes, kFarBeacon, draws);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].measured, 1.1, 1e-12);
}

TEST(Contacts, BeaconAndDeadPeers) {
  const Beacon b{{0.0, 0.0}, 2.5};
  const std::vector<CommsNode> nodes{node(1.0), node(2.0, 0.0, 2.5, false)};
  const auto c = ultrasonic_contacts(0, nodes, b, zeros(2));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].peer, kReference);
}

TEST(Chain, TwoHop) {
  const Beacon b;
  const auto s = compute_chain({node(1.0), node(2.5)}, b, 2.0);
  EXPECT_TRUE(s.linked[0]);
  EXPECT_TRUE(s.linked[1]);
  EXPECT_EQ(s.hops[0], 1);
  EXPECT_EQ(s.hops[1], 2);
}

TEST(Chain, TooFar) {
  const auto s = compute_chain({node(2.5)}, Beacon{}, 2.0);
  EXPECT_FALSE(s.linked[0]);
  EXPECT_EQ(s.hops[0], ChainStatus::kUnreachable);
}

TEST(Chain, FailedMiddleBreaksChain) {
  const auto s = compute_chain({node(1.0), node(2.5, 0.0, 2.5, false), node(4.0)}, Beacon{}, 2.0);
  EXPECT_TRUE(s.linked[0]);
  EXPECT_FALSE(s.linked[1]);
  EXPECT_FALSE(s.linked[2]);
}

TEST(Chain, NeedsMutualContact) {
  // The far robot hears the near one but cannot be heard back.
  const auto s = compute_chain({node(1.0), node(2.6, 0.0, 1.0)}, Beacon{}, 2.0);
  EXPECT_TRUE(s.linked[0]);
  EXPECT_FALSE(s.linked[1]);
}

TEST(Chain, AddingEdgesNeverUnlinks) {
  RandomStream r(4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<CommsNode> nodes;
    for (int i = 0; i < 5; ++i) nodes.push_back(node(r.uniform(0, 5), r.uniform(-0.4, 0.4), r.uniform(0.5, 2.5)));
    const auto before = compute_chain(nodes, Beacon{}, 2.0);
    nodes[static_cast<std::size_t>(trial % 5)].range = 2.5;
    const auto after = compute_chain(nodes, Beacon{}, 2.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!before.linked[i]) continue;
      ASSERT_TRUE(after.linked[i]);
      ASSERT_LE(after.hops[i], before.hops[i]);
    }
  }
}

TEST(Chain, IdealFormationFullyLinked) {
  RandomStream r(6);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<CommsNode> nodes;
    double x = 0.0;
    for (int i = 0; i < 5; ++i) {
      x += r.uniform(0.2, 1.9);
      nodes.push_back(node(x, r.uniform(-0.05, 0.05)));
    }
    const auto s = compute_chain(nodes, Beacon{}, 2.0);
    for (bool l : s.linked) ASSERT_TRUE(l);
  }
}

TEST(Handshake, AllConfirm) {
  EXPECT_EQ(handshake_sample(0, {node(0.0), node(1.8)}, kFarBeacon, 2.0), 0);
}

TEST(Handshake, ShortRangeIsCaught) {
  EXPECT_EQ(handshake_sample(0, {node(0.0, 0.0, 1.5), node(1.8)}, kFarBeacon, 2.0), 1);
}

TEST(Handshake, NoNeighbours) {
  EXPECT_EQ(handshake_sample(0, {node(0.0, 0.0, 0.5), node(2.3)}, kFarBeacon, 2.0), 0);
}

TEST(Handshake, BeaconTakesPart) {
  const Beacon b{{0.0, 0.0}, 2.5};
  EXPECT_EQ(handshake_sample(0, {node(1.2, 0.0, 1.0)}, b, 2.0), 1);
  EXPECT_EQ(handshake_sample(0, {node(1.2, 0.0, 1.3)}, b, 2.0), 0);
}

TEST(Handshake, NeverFiresWithFullRange) {
  RandomStream r(12);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<CommsNode> nodes;
    for (int i = 0; i < 5; ++i) nodes.push_back(node(r.uniform(-2, 4), r.uniform(-1, 1)));
    for (int i = 0; i < 5; ++i) ASSERT_EQ(handshake_sample(i, nodes, Beacon{}, 2.0), 0);
  }
}

TEST(Handshake, AlwaysFiresWhenPeerBeyondRange) {
  RandomStream r(13);
  for (int trial = 0; trial < 2000; ++trial) {
    const double range = r.uniform(0.5, 1.99);
    const double gap = r.uniform(range + 1e-6, 2.0);
    std::vector<CommsNode> nodes{node(0.0, 0.0, range), node(gap)};
    ASSERT_EQ(handshake_sample(0, nodes, kFarBeacon, 2.0), 1) << range << " " << gap;
  }
}

TEST(Estimate, Examples) {
  ChainStatus chain;
  chain.linked = {false};
  chain.hops = {ChainStatus::kUnreachable};
  const std::vector<UltrasonicContact> contacts{{kReference, 1.0, 1.0}};
  const auto exact = estimate_position({1.0, 0.0}, contacts, chain, 0.0, 0.3);
  ASSERT_TRUE(exact.has_value());
  EXPECT_NEAR(exact->x, 1.0, 1e-12);
  EXPECT_NEAR(exact->y, 0.0, 1e-12);

  const auto off = estimate_position({1.0, 0.0}, contacts, chain, 1.0, std::numbers::pi / 2);
  ASSERT_TRUE(off.has_value());
  EXPECT_NEAR(off->x, 1.0, 1e-12);
  EXPECT_NEAR(off->y, 0.1, 1e-12);
}

TEST(Estimate, LostWithoutLinkedAnchor) {
  ChainStatus chain;
  chain.linked = {false, false};
  chain.hops = {ChainStatus::kUnreachable, ChainStatus::kUnreachable};
  EXPECT_FALSE(estimate_position({3.0, 0.0}, {{1, 1.0, 1.0}}, chain, 0.0, 0.0).has_value());
  EXPECT_FALSE(estimate_position({3.0, 0.0}, {}, chain, 0.0, 0.0).has_value());
  chain.linked[1] = true;
  EXPECT_TRUE(estimate_position({3.0, 0.0}, {{1, 1.0, 1.0}}, chain, 0.0, 0.0).has_value());
}
