#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "snowsim/agents.hpp"
#include "snowsim/category.hpp"
#include "snowsim/game.hpp"
#include "snowsim/rng.hpp"
#include "snowsim/topology.hpp"

namespace snowsim {

struct Params {
  PayoffParams payoff;
  MemoryParams memory;
  FermiParams fermi;
  QLearnParams qlearn;
  TransitionParams transition;

  void validate() const {
    payoff.validate();
    memory.validate();
    fermi.validate();
    qlearn.validate();
    transition.validate();
  }
};

struct MetricsRecord {
  std::uint32_t t;
  double f_c;                   // cooperator fraction at the end of step t
  std::uint32_t learner_count;  // learners at the end of step t

  bool operator==(const MetricsRecord&) const = default;
};

using MetricsSeries = std::vector<MetricsRecord>;

// Per-node strategies at one instant, row-major on lattices.
struct Snapshot {
  std::uint32_t t = 0;
  std::uint32_t side = 0;
  std::vector<Strategy> cells;

  // Exact text layout: "t=<int> side=<int>" then `side` rows of `side`
  // 'C'/'D' characters, each line newline-terminated.
  std::string to_text() const {
    std::string out = "t=" + std::to_string(t) + " side=" + std::to_string(side) + "\n";
    for (std::uint32_t y = 0; y < side; ++y) {
      for (std::uint32_t x = 0; x < side; ++x) {
        out += cells[y * side + x] == Strategy::Cooperate ? 'C' : 'D';
      }
      out += '\n';
    }
    return out;
  }

  bool operator==(const Snapshot&) const = default;
};

// One trajectory: the network (not owned), all agent states, the round
// counter, and the trajectory's random stream.
struct SimState {
  const Network* net = nullptr;
  std::vector<AgentState> agents;
  std::uint32_t t = 0;
  Rng rng{0};

  // step() scratch, excluded from semantic comparisons.
  std::vector<Strategy> snapshot_buf;
  std::vector<double> utility_buf;
  std::vector<Strategy> next_buf;

  std::uint32_t cooperator_count() const {
    std::uint32_t c = 0;
    for (const auto& a : agents) c += a.strategy == Strategy::Cooperate;
    return c;
  }
  std::uint32_t learner_count() const {
    std::uint32_t c = 0;
    for (const auto& a : agents) c += a.category == Category::Learner;
    return c;
  }
};

// Coin-toss initial condition: for each agent in ascending node order,
// one next_double() decides the strategy (< 0.5 -> Cooperate) and one
// decides the category (< 0.5 -> Learner). Histories start empty,
// Q-tables all-zero, no pending transition.
inline SimState init(const Network& net, const Params& params, std::uint64_t seed) {
  params.validate();
  SimState st;
  st.net = &net;
  st.rng = Rng(seed);
  st.t = 0;
  const std::uint32_t q_states = net.max_degree() + 1;
  st.agents.reserve(net.n);
  for (NodeId i = 0; i < net.n; ++i) {
    const Strategy s =
        st.rng.next_double() < 0.5 ? Strategy::Cooperate : Strategy::Defect;
    const Category c = st.rng.next_double() < 0.5 ? Category::Learner : Category::Profiteer;
    st.agents.push_back(
        AgentState{s, c, PayoffHistory(params.memory.m), QTable(q_states), std::nullopt});
  }
  return st;
}

// Advance one round. Phases, each reading the strategy/category snapshot
// taken at its start:
//
//   1 PLAY      every agent accumulates its round payoff against all
//               neighbors and pushes it into its history (no draws).
//   2 UTILITY   memory-discounted utility of every agent (no draws).
//   3 STRATEGY  synchronous: next strategies are computed against the
//               step-start snapshot, then applied at once.
//               Per agent, ascending node id:
//                 profiteer -> fermi_update (neighbor pick + acceptance
//                              draw);
//                 learner   -> if a (state, action) pair is pending,
//                              q_update with reward = this step's utility
//                              and next state = cooperating-neighbor
//                              count in the snapshot; then q_select on
//                              that same state, which becomes the new
//                              pending pair.
//   4 CATEGORY  one step_category draw per agent, ascending node id.
//               A learner that turns profiteer drops its pending pair,
//               so a later return to learning starts with a fresh
//               selection (the Q-table itself is kept).
//   5 metrics   t += 1; f_c and learner count reflect the post-step
//               state.
inline MetricsRecord step(SimState& st, const Params& params) {
  const Network& net = *st.net;
  const NodeId n = net.n;

  auto& snap = st.snapshot_buf;
  snap.resize(n);
  for (NodeId i = 0; i < n; ++i) snap[i] = st.agents[i].strategy;

  for (NodeId i = 0; i < n; ++i) {
    st.agents[i].hist.push(round_payoff(net, i, snap, params.payoff));
  }

  auto& util = st.utility_buf;
  util.resize(n);
  for (NodeId i = 0; i < n; ++i) {
    util[i] = memory_payoff(st.agents[i].hist, params.memory);
  }

  auto& next = st.next_buf;
  next.resize(n);
  for (NodeId i = 0; i < n; ++i) {
    AgentState& a = st.agents[i];
    if (a.category == Category::Profiteer) {
      next[i] = fermi_update(i, net, snap, util, params.fermi, st.rng);
    } else {
      const std::uint32_t s_now = state_index(i, net, snap);
      if (a.last) {
        q_update(a.qtable, a.last->state, a.last->action, util[i], s_now, params.qlearn);
      }
      const Strategy action = q_select(a.qtable, s_now, params.qlearn, st.rng);
      a.last = PendingTransition{s_now, action};
      next[i] = action;
    }
  }

  std::uint32_t cooperators = 0;
  for (NodeId i = 0; i < n; ++i) {
    st.agents[i].strategy = next[i];
    cooperators += next[i] == Strategy::Cooperate;
  }

  std::uint32_t learners = 0;
  for (NodeId i = 0; i < n; ++i) {
    AgentState& a = st.agents[i];
    const Category after = step_category(a.category, params.transition, st.rng);
    if (a.category == Category::Learner && after == Category::Profiteer) a.last.reset();
    a.category = after;
    learners += after == Category::Learner;
  }

  ++st.t;
  return {st.t, static_cast<double>(cooperators) / static_cast<double>(n), learners};
}

struct RunResult {
  MetricsSeries metrics;
  std::vector<Snapshot> snapshots;
};

inline Snapshot take_snapshot(const SimState& st) {
  Snapshot snap;
  snap.t = st.t;
  snap.side = st.net->side;
  snap.cells.reserve(st.agents.size());
  for (const auto& a : st.agents) snap.cells.push_back(a.strategy);
  return snap;
}

// init + `steps` rounds; snapshots are captured whenever the round
// counter hits a requested time (0 means the initial condition).
inline RunResult run(const Network& net, const Params& params, std::uint64_t seed,
                     std::uint32_t steps, const std::set<std::uint32_t>& snapshot_times = {}) {
  if (steps < 1) throw std::invalid_argument("run: steps must be >= 1");
  if (!snapshot_times.empty() && net.kind != Network::Kind::SquareLattice) {
    throw std::invalid_argument("run: snapshots are defined for square lattices only");
  }
  RunResult result;
  result.metrics.reserve(steps);
  SimState st = init(net, params, seed);
  if (snapshot_times.count(0)) result.snapshots.push_back(take_snapshot(st));
  for (std::uint32_t k = 0; k < steps; ++k) {
    result.metrics.push_back(step(st, params));
    if (snapshot_times.count(st.t)) result.snapshots.push_back(take_snapshot(st));
  }
  return result;
}

// How one run's network is built; lattices are deterministic, small
// worlds are rewired from the stream seeded by derive_network_seed.
struct NetworkSpec {
  Network::Kind kind = Network::Kind::SquareLattice;
  std::uint32_t side = 50;        // SquareLattice
  NodeId n = 2500;                // SmallWorld
  std::uint32_t ring_degree = 4;  // SmallWorld
  double rewire_prob = 0.2;       // SmallWorld

  std::uint32_t node_count() const {
    return kind == Network::Kind::SquareLattice ? side * side : n;
  }

  void validate() const {
    if (kind == Network::Kind::SquareLattice) {
      if (side < 2) throw std::invalid_argument("side must be >= 2");
    } else {
      if (ring_degree == 0 || ring_degree % 2 != 0) {
        throw std::invalid_argument("ring_degree must be a positive even number");
      }
      if (n <= ring_degree) throw std::invalid_argument("n must exceed ring_degree");
      if (!(rewire_prob >= 0.0 && rewire_prob <= 1.0)) {
        throw std::invalid_argument("rewire_prob must be in [0, 1]");
      }
    }
  }
};

inline Network build_network(const NetworkSpec& spec, std::uint64_t network_seed) {
  spec.validate();
  if (spec.kind == Network::Kind::SquareLattice) return gen_square_lattice(spec.side);
  Rng rng(network_seed);
  return gen_small_world(spec.n, spec.ring_degree, spec.rewire_prob, rng);
}

struct RunTail {
  std::uint64_t seed;
  double mean_f_c;       // mean over the last `tail` steps
  double mean_learners;  // same window
};

struct EnsembleSummary {
  std::vector<RunTail> runs;
  double mean_f_c = 0.0;
  double mean_learners = 0.0;
};

// Independent runs, one per seed. The lattice is built once and shared;
// a small world is rebuilt per seed so each run sees fresh rewiring.
inline EnsembleSummary run_ensemble(const NetworkSpec& spec, const Params& params,
                                    std::span<const std::uint64_t> seeds, std::uint32_t steps,
                                    std::uint32_t tail) {
  if (seeds.empty()) throw std::invalid_argument("run_ensemble: seed list is empty");
  if (tail < 1 || tail > steps) {
    throw std::invalid_argument("run_ensemble: tail must be in [1, steps]");
  }
  spec.validate();
  params.validate();

  std::optional<Network> shared;
  if (spec.kind == Network::Kind::SquareLattice) shared = build_network(spec, 0);

  EnsembleSummary out;
  out.runs.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    std::optional<Network> local;
    const Network* net = nullptr;
    if (shared) {
      net = &*shared;
    } else {
      local = build_network(spec, derive_network_seed(seed));
      net = &*local;
    }
    const RunResult rr = run(*net, params, seed, steps);
    double sum_fc = 0.0;
    double sum_learners = 0.0;
    for (std::size_t k = rr.metrics.size() - tail; k < rr.metrics.size(); ++k) {
      sum_fc += rr.metrics[k].f_c;
      sum_learners += static_cast<double>(rr.metrics[k].learner_count);
    }
    out.runs.push_back({seed, sum_fc / tail, sum_learners / tail});
    out.mean_f_c += out.runs.back().mean_f_c;
    out.mean_learners += out.runs.back().mean_learners;
  }
  out.mean_f_c /= static_cast<double>(out.runs.size());
  out.mean_learners /= static_cast<double>(out.runs.size());
  return out;
}

}  // namespace snowsim
