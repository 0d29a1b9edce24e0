#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace snowsim {

// Single random stream backing one trajectory (or one network build).
//
// Every stochastic decision in the library goes through the two draw
// primitives below, so a trajectory is a pure function of its seed:
//
//   next_double() = (mt19937_64() >> 11) * 2^-53        uniform in [0,1)
//   next_below(k) = mt19937_64() % k                    uniform in {0..k-1}
//
// The modulo bias of next_below is < 2^-50 for the k used here (node and
// neighbor counts) and is accepted in exchange for a draw protocol simple
// enough to restate in an independent reference implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double next_double() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  std::size_t next_below(std::size_t k) {
    if (k == 0) throw std::invalid_argument("Rng::next_below: k must be positive");
    return static_cast<std::size_t>(gen_() % k);
  }

  std::uint64_t next_u64() { return gen_(); }

  friend bool operator==(const Rng& a, const Rng& b) { return a.gen_ == b.gen_; }

 private:
  std::mt19937_64 gen_;
};

// SplitMix64 finalizer, used to decorrelate derived seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of the index-th independent run under a master seed.
inline std::uint64_t derive_run_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + index * 0x9E3779B97F4A7C15ULL);
}

// Seed of the network-construction stream attached to a run seed; kept
// separate so a run's trajectory stream starts at a fixed position
// regardless of whether its network needed random construction.
inline std::uint64_t derive_network_seed(std::uint64_t run_seed) {
  return splitmix64(run_seed ^ 0x4E4554574F524B53ULL);
}

}  // namespace snowsim
