#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "tunnelswarm/geometry.hpp"

namespace tunnelswarm {

/// Peer index used for the fixed tunnel reference beacon.
inline constexpr int kReference = -1;

/// What the comms layer knows about one robot at the current tick.
struct CommsNode {
  Vec2 position;          // ground truth
  Vec2 believed;          // self-estimate shared over radio
  double range = 0.0;     // current ultrasonic range
  bool alive = true;
};

struct UltrasonicContact {
  int peer = kReference;
  double measured = 0.0;
  double true_range = 0.0;
};

struct ChainStatus {
  static constexpr int kUnreachable = std::numeric_limits<int>::max();

  std::vector<bool> linked;
  std::vector<int> hops;
};

struct Beacon {
  Vec2 position{0.0, 0.0};
  double range = 2.5;
};

/// Peers (and the beacon) whose emission reaches `self`: each is within its
/// own degraded range. `draws` holds one standard normal per node followed by
/// one for the beacon.
std::vector<UltrasonicContact> ultrasonic_contacts(int self, const std::vector<CommsNode>& nodes,
                                                   const Beacon& beacon,
                                                   const std::vector<double>& draws,
                                                   double noise_fraction = 0.1);

/// Breadth-first linkage from the beacon over mutual contacts no longer than
/// `link_range`.
ChainStatus compute_chain(const std::vector<CommsNode>& nodes, const Beacon& beacon,
                          double link_range);

/// 1 when a peer believed to be within `link_range`, and heard by this robot,
/// did not hear this robot back. The beacon takes part as a peer.
int handshake_sample(int self, const std::vector<CommsNode>& nodes, const Beacon& beacon,
                     double link_range);

/// Position estimate from the nearest linked anchor in contact, or nullopt
/// when there is none. The offset has magnitude |noise_fraction * draw| times
/// the anchor range, in direction `angle`.
std::optional<Vec2> estimate_position(Vec2 truth, const std::vector<UltrasonicContact>& contacts,
                                      const ChainStatus& chain, double draw, double angle,
                                      double noise_fraction = 0.1);

}  // namespace tunnelswarm
