#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "snowsim/game.hpp"
#include "snowsim/rng.hpp"
#include "snowsim/topology.hpp"

namespace snowsim {

enum class Category : std::uint8_t { Profiteer = 0, Learner = 1 };

struct FermiParams {
  double kappa = 0.1;  // imitation noise

  void validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  }
};

struct QLearnParams {
  double alpha = 0.8;    // learning rate
  double gamma = 0.1;    // discount factor
  double epsilon = 0.1;  // exploration rate

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0, 1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in [0, 1]");
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
      throw std::invalid_argument("epsilon must be in [0, 1]");
  }
};

// Action values indexed by (number of cooperating neighbors, action).
// Sized by the network's maximum degree so all agents share one shape;
// rows above an agent's own degree are simply never visited.
class QTable {
 public:
  QTable() = default;
  explicit QTable(std::uint32_t num_states) : q_(2u * num_states, 0.0) {}

  std::uint32_t num_states() const { return static_cast<std::uint32_t>(q_.size() / 2); }

  double at(std::uint32_t state, Strategy action) const {
    return q_[index(state, action)];
  }
  double& at(std::uint32_t state, Strategy action) {
    return q_[index(state, action)];
  }

  double row_max(std::uint32_t state) const {
    return std::max(at(state, Strategy::Cooperate), at(state, Strategy::Defect));
  }

  bool operator==(const QTable& other) const = default;

 private:
  std::size_t index(std::uint32_t state, Strategy action) const {
    if (state >= num_states()) throw std::invalid_argument("QTable: state index out of range");
    return 2u * state + static_cast<std::size_t>(action);
  }

  std::vector<double> q_;
};

// Probability that i adopts j's strategy given utilities u_i and u_j.
// exp saturates to 0 or inf for large arguments, so the result is always
// in [0, 1] for finite inputs.
inline double fermi_prob(double u_i, double u_j, const FermiParams& fp) {
  return 1.0 / (1.0 + std::exp((u_i - u_j) / fp.kappa));
}

// Number of cooperators among i's neighbors (i's own strategy excluded).
inline std::uint32_t state_index(NodeId i, const Network& net,
                                 std::span<const Strategy> strategies) {
  std::uint32_t count = 0;
  for (NodeId j : net.neighbors(i)) count += strategies[j] == Strategy::Cooperate;
  return count;
}

// Profiteer rule: pick one neighbor uniformly, adopt its strategy with
// Fermi probability, otherwise keep the current one. Draws one
// next_below(degree) and one next_double() acceptance draw, always in
// that order and even when the strategies already agree.
inline Strategy fermi_update(NodeId i, const Network& net, std::span<const Strategy> strategies,
                             std::span<const double> utilities, const FermiParams& fp, Rng& rng) {
  const auto& nb = net.neighbors(i);
  if (nb.empty()) throw std::domain_error("fermi_update: node has no neighbors");
  const NodeId j = nb[rng.next_below(nb.size())];
  const double w = fermi_prob(utilities[i], utilities[j], fp);
  return rng.next_double() < w ? strategies[j] : strategies[i];
}

// Epsilon-greedy action choice for the given state row. Draws one
// next_double() exploration draw; a next_below(2) follows only when
// exploring or when the row is an exact tie (0 maps to Cooperate).
inline Strategy q_select(const QTable& qt, std::uint32_t state, const QLearnParams& qp,
                         Rng& rng) {
  const double qc = qt.at(state, Strategy::Cooperate);
  const double qd = qt.at(state, Strategy::Defect);
  if (rng.next_double() < qp.epsilon) {
    return static_cast<Strategy>(rng.next_below(2));
  }
  if (qc > qd) return Strategy::Cooperate;
  if (qd > qc) return Strategy::Defect;
  return static_cast<Strategy>(rng.next_below(2));
}

// One-cell temporal-difference update; the rest of the table is untouched.
inline void q_update(QTable& qt, std::uint32_t s_t, Strategy a_t, double reward,
                     std::uint32_t s_next, const QLearnParams& qp) {
  double& cell = qt.at(s_t, a_t);
  cell += qp.alpha * (reward + qp.gamma * qt.row_max(s_next) - cell);
}

// Learner's stored (state, action) awaiting its reward.
struct PendingTransition {
  std::uint32_t state;
  Strategy action;

  bool operator==(const PendingTransition&) const = default;
};

struct AgentState {
  Strategy strategy;
  Category category;
  PayoffHistory hist;
  QTable qtable;
  std::optional<PendingTransition> last;

  bool operator==(const AgentState&) const = default;
};

}  // namespace snowsim
