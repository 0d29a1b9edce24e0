#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "snowsim/topology.hpp"

namespace snowsim {

enum class Strategy : std::uint8_t { Cooperate = 0, Defect = 1 };

// Snowdrift payoffs: R=1, S=1-r, T=1+r, P=0.
struct PayoffParams {
  double r = 0.6;  // cost-to-benefit ratio

  void validate() const {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("r must be in [0, 1]");
  }
};

struct MemoryParams {
  std::uint32_t m = 5;  // memory length in rounds
  double beta = 0.5;    // decay applied per round of age

  void validate() const {
    if (m < 1) throw std::invalid_argument("M must be >= 1");
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must be in [0, 1]");
  }
};

inline double pair_payoff(Strategy mine, Strategy theirs, const PayoffParams& pp) {
  if (mine == Strategy::Cooperate) {
    return theirs == Strategy::Cooperate ? 1.0 : 1.0 - pp.r;
  }
  return theirs == Strategy::Cooperate ? 1.0 + pp.r : 0.0;
}

// One round's accumulated payoff of node i against all its neighbors.
inline double round_payoff(const Network& net, NodeId i, std::span<const Strategy> strategies,
                           const PayoffParams& pp) {
  double sum = 0.0;
  for (NodeId j : net.neighbors(i)) sum += pair_payoff(strategies[i], strategies[j], pp);
  return sum;
}

// Chronological window of the last m round payoffs; pushing when full
// evicts the oldest entry. Raw round payoffs are stored (not discounted
// values) so the decay factor can be applied at read time.
class PayoffHistory {
 public:
  PayoffHistory() = default;

  explicit PayoffHistory(std::uint32_t capacity) : buf_(capacity), cap_(capacity) {
    if (capacity == 0) throw std::invalid_argument("PayoffHistory: capacity must be >= 1");
  }

  void push(double round_payoff) {
    if (cap_ == 0) throw std::domain_error("PayoffHistory: push into zero-capacity history");
    buf_[next_] = round_payoff;
    next_ = (next_ + 1) % cap_;
    if (size_ < cap_) ++size_;
  }

  std::size_t size() const { return size_; }
  std::uint32_t capacity() const { return cap_; }
  bool empty() const { return size_ == 0; }

  // offset 0 is the most recent round.
  double newest_minus(std::uint32_t offset) const {
    if (offset >= size_) throw std::invalid_argument("PayoffHistory: offset out of range");
    return buf_[(next_ + cap_ - 1 - offset) % cap_];
  }

  // Horner evaluation of sum_a beta^a * payoff[newest - a] over the last
  // min(m, size) entries, accumulated oldest to newest. beta = 0 yields
  // the newest payoff (the age-zero weight is 1 by convention).
  double discounted_sum(double beta, std::uint32_t m) const {
    if (size_ == 0) throw std::domain_error("PayoffHistory: discounted_sum of empty history");
    const std::uint32_t len = std::min<std::uint32_t>(m, size_);
    std::uint32_t idx = (next_ + cap_ - len) % cap_;
    double u = buf_[idx];
    for (std::uint32_t k = 1; k < len; ++k) {
      if (++idx == cap_) idx = 0;
      u = u * beta + buf_[idx];
    }
    return u;
  }

  bool operator==(const PayoffHistory& other) const = default;

 private:
  std::vector<double> buf_;
  std::uint32_t cap_ = 0;
  std::uint32_t size_ = 0;
  std::uint32_t next_ = 0;  // write position
};

inline void push_round(PayoffHistory& hist, double pi) { hist.push(pi); }

// Memory-discounted utility over the stored window.
inline double memory_payoff(const PayoffHistory& hist, const MemoryParams& mp) {
  if (hist.empty()) throw std::domain_error("memory_payoff: history is empty");
  return hist.discounted_sum(mp.beta, mp.m);
}

}  // namespace snowsim
