#include "tunnelswarm/comms.hpp"

#include <cmath>
#include <deque>

namespace tunnelswarm {

std::vector<UltrasonicContact> ultrasonic_contacts(int self, const std::vector<CommsNode>& nodes,
                                                   const Beacon& beacon,
                                                   const std::vector<double>& draws,
                                                   double noise_fraction) {
  std::vector<UltrasonicContact> out;
  const CommsNode& me = nodes[static_cast<std::size_t>(self)];
  if (!me.alive) return out;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (static_cast<int>(j) == self || !nodes[j].alive) continue;
    const double d = distance(me.position, nodes[j].position);
    if (d > nodes[j].range) continue;
    out.push_back({static_cast<int>(j), d * (1.0 + noise_fraction * draws[j]), d});
  }
  const double d = distance(me.position, beacon.position);
  if (d <= beacon.range) {
    out.push_back({kReference, d * (1.0 + noise_fraction * draws[nodes.size()]), d});
  }
  return out;
}

ChainStatus compute_chain(const std::vector<CommsNode>& nodes, const Beacon& beacon,
                          double link_range) {
  const std::size_t n = nodes.size();
  ChainStatus status;
  status.linked.assign(n, false);
  status.hops.assign(n, ChainStatus::kUnreachable);

  auto mutual = [&](double d, double ra, double rb) {
    return d <= link_range && d <= ra && d <= rb;
  };

  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (!nodes[i].alive) continue;
    const double d = distance(nodes[i].position, beacon.position);
    if (mutual(d, nodes[i].range, beacon.range)) {
      status.linked[i] = true;
      status.hops[i] = 1;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t j = 0; j < n; ++j) {
      if (status.linked[j] || !nodes[j].alive) continue;
      const double d = distance(nodes[i].position, nodes[j].position);
      if (mutual(d, nodes[i].range, nodes[j].range)) {
        status.linked[j] = true;
        status.hops[j] = status.hops[i] + 1;
        queue.push_back(j);
      }
    }
  }
  return status;
}

int handshake_sample(int self, const std::vector<CommsNode>& nodes, const Beacon& beacon,
                     double link_range) {
  const CommsNode& me = nodes[static_cast<std::size_t>(self)];
  if (!me.alive) return 0;
  // A peer counts when it is believed close and its own emission reached us;
  // it confirms when ours reached it.
  auto unconfirmed = [&](Vec2 peer_truth, Vec2 peer_believed, double peer_range) {
    if (distance(me.believed, peer_believed) > link_range) return false;
    const double d = distance(me.position, peer_truth);
    if (d > peer_range) return false;
    return d > me.range;
  };
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (static_cast<int>(j) == self || !nodes[j].alive) continue;
    if (unconfirmed(nodes[j].position, nodes[j].believed, nodes[j].range)) return 1;
  }
  return unconfirmed(beacon.position, beacon.position, beacon.range) ? 1 : 0;
}

std::optional<Vec2> estimate_position(Vec2 truth, const std::vector<UltrasonicContact>& contacts,
                                      const ChainStatus& chain, double draw, double angle,
                                      double noise_fraction) {
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& c : contacts) {
    const bool anchor = c.peer == kReference || chain.linked[static_cast<std::size_t>(c.peer)];
    if (anchor && c.true_range < nearest) nearest = c.true_range;
  }
  if (!std::isfinite(nearest)) return std::nullopt;
  const double magnitude = std::abs(noise_fraction * draw) * nearest;
  return truth + unit(angle) * magnitude;
}

}  // namespace tunnelswarm
