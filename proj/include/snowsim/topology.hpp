#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "snowsim/rng.hpp"

namespace snowsim {

using NodeId = std::uint32_t;

// Immutable interaction graph. Adjacency lists are sorted ascending and
// stay fixed after construction; this ordering is part of the contract
// because strategy updates pick neighbors by list index.
struct Network {
  enum class Kind { SquareLattice, SmallWorld };

  Kind kind = Kind::SquareLattice;
  NodeId n = 0;
  std::uint32_t side = 0;         // SquareLattice only
  std::uint32_t ring_degree = 0;  // SmallWorld only
  double rewire_prob = 0.0;       // SmallWorld only
  std::vector<std::vector<NodeId>> adjacency;

  const std::vector<NodeId>& neighbors(NodeId i) const {
    if (i >= n) {
      throw std::invalid_argument("Network::neighbors: node id " + std::to_string(i) +
                                  " out of range (n=" + std::to_string(n) + ")");
    }
    return adjacency[i];
  }

  std::uint32_t max_degree() const {
    std::size_t d = 0;
    for (const auto& nb : adjacency) d = std::max(d, nb.size());
    return static_cast<std::uint32_t>(d);
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& nb : adjacency) twice += nb.size();
    return twice / 2;
  }
};

inline const std::vector<NodeId>& neighbors(const Network& net, NodeId i) {
  return net.neighbors(i);
}

// Torus with von Neumann neighborhoods; node (x, y) has id y*side + x.
// For side 2 the wraparound collapses each neighbor pair into one edge,
// so degrees drop to 2 (duplicate edges are never stored).
inline Network gen_square_lattice(std::uint32_t side) {
  if (side < 2) throw std::invalid_argument("gen_square_lattice: side must be >= 2");
  Network net;
  net.kind = Network::Kind::SquareLattice;
  net.side = side;
  net.n = side * side;
  net.adjacency.resize(net.n);
  for (std::uint32_t y = 0; y < side; ++y) {
    for (std::uint32_t x = 0; x < side; ++x) {
      const NodeId id = y * side + x;
      std::vector<NodeId> nb = {
          y * side + (x + 1) % side,
          y * side + (x + side - 1) % side,
          ((y + 1) % side) * side + x,
          ((y + side - 1) % side) * side + x,
      };
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
      net.adjacency[id] = std::move(nb);
    }
  }
  return net;
}

// Watts-Strogatz construction. Starting from a ring where every node is
// linked to its ring_degree/2 nearest neighbors on each side, each
// clockwise edge (i, i+d) is visited exactly once (lane d = 1..k/2 outer,
// node i ascending inner) and with probability rewire_prob its far
// endpoint is replaced by a uniformly random node. Targets that would
// form a self-loop or duplicate edge are redrawn, up to a bounded number
// of retries, after which the original edge is kept; edge count is
// therefore conserved exactly.
//
// Draw schedule per visited edge: one next_double() for the rewire
// decision (taken even when rewire_prob is 0), then one next_below(n)
// per retry.
inline Network gen_small_world(NodeId n, std::uint32_t ring_degree, double rewire_prob,
                               Rng& rng) {
  if (ring_degree == 0 || ring_degree % 2 != 0) {
    throw std::invalid_argument("gen_small_world: ring_degree must be a positive even number");
  }
  if (n <= ring_degree) {
    throw std::invalid_argument("gen_small_world: n must exceed ring_degree");
  }
  if (!(rewire_prob >= 0.0 && rewire_prob <= 1.0)) {
    throw std::invalid_argument("gen_small_world: rewire_prob must be in [0, 1]");
  }

  constexpr int kRewireRetries = 100;
  const std::uint32_t half = ring_degree / 2;

  std::vector<std::vector<NodeId>> adj(n);
  for (std::uint32_t d = 1; d <= half; ++d) {
    for (NodeId i = 0; i < n; ++i) {
      const NodeId j = (i + d) % n;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }

  auto adjacent = [&adj](NodeId a, NodeId b) {
    return std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end();
  };
  auto drop = [&adj](NodeId a, NodeId b) { std::erase(adj[a], b); };

  for (std::uint32_t d = 1; d <= half; ++d) {
    for (NodeId i = 0; i < n; ++i) {
      const NodeId old_target = (i + d) % n;
      if (rng.next_double() >= rewire_prob) continue;
      for (int attempt = 0; attempt < kRewireRetries; ++attempt) {
        const NodeId w = static_cast<NodeId>(rng.next_below(n));
        if (w == i || adjacent(i, w)) continue;
        drop(i, old_target);
        drop(old_target, i);
        adj[i].push_back(w);
        adj[w].push_back(i);
        break;
      }
    }
  }

  for (auto& nb : adj) std::sort(nb.begin(), nb.end());

  Network net;
  net.kind = Network::Kind::SmallWorld;
  net.n = n;
  net.ring_degree = ring_degree;
  net.rewire_prob = rewire_prob;
  net.adjacency = std::move(adj);
  return net;
}

}  // namespace snowsim
