#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>

#include "snowsim/agents.hpp"
#include "snowsim/rng.hpp"

namespace snowsim {

// Two-state Markov chain over {Learner, Profiteer}: a learner becomes a
// profiteer with probability p per step, a profiteer becomes a learner
// with probability q. p and q are unrelated.
struct TransitionParams {
  double p = 0.5;  // learner -> profiteer
  double q = 0.5;  // profiteer -> learner

  void validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0, 1]");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must be in [0, 1]");
  }
};

struct StationaryDist {
  double pi_learner;
  double pi_profiteer;
};

// One Markov step; consumes exactly one next_double() regardless of p, q.
inline Category step_category(Category c, const TransitionParams& tp, Rng& rng) {
  const double d = rng.next_double();
  if (c == Category::Learner) {
    return d < tp.p ? Category::Profiteer : Category::Learner;
  }
  return d < tp.q ? Category::Learner : Category::Profiteer;
}

// Closed-form stationary distribution (q/(p+q), p/(p+q)). Undefined for
// p = q = 0, where the transition matrix is the identity and the chain
// never leaves its initial state.
inline StationaryDist stationary(const TransitionParams& tp) {
  if (tp.p + tp.q <= 0.0) {
    throw std::domain_error("stationary: undefined for p = q = 0");
  }
  return {tp.q / (tp.p + tp.q), tp.p / (tp.p + tp.q)};
}

// Expected (learners, profiteers) once the chain has mixed; the two
// components sum to n exactly.
inline std::pair<double, double> expected_counts(const TransitionParams& tp, std::uint32_t n) {
  const double learners = static_cast<double>(n) * stationary(tp).pi_learner;
  return {learners, static_cast<double>(n) - learners};
}

}  // namespace snowsim
