#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>

namespace snowsim {

// Mean of the last `tail` entries.
inline double tail_mean(std::span<const double> xs, std::size_t tail) {
  if (tail == 0 || tail > xs.size()) {
    throw std::invalid_argument("tail_mean: tail must be in [1, size]");
  }
  double sum = 0.0;
  for (std::size_t k = xs.size() - tail; k < xs.size(); ++k) sum += xs[k];
  return sum / static_cast<double>(tail);
}

// |observed - expected| / expected; the reference value must be nonzero.
inline double relative_error(double observed, double expected) {
  if (expected == 0.0) throw std::domain_error("relative_error: reference value is zero");
  return std::abs(observed - expected) / expected;
}

struct MomentReport {
  double mean;
  double std;       // population standard deviation (n divisor)
  double skewness;  // bias-corrected sample skewness
  double kurtosis;  // bias-corrected excess kurtosis

  bool operator==(const MomentReport&) const = default;
};

// First four moments of a sample. std uses the n divisor; skewness and
// kurtosis use the bias-corrected sample estimators built on the
// (n - 1)-divisor standard deviation, kurtosis reported as excess.
inline MomentReport moments(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 4) throw std::invalid_argument("moments: need at least 4 samples");
  const double dn = static_cast<double>(n);

  bool constant = true;
  for (double x : xs) constant = constant && x == xs[0];
  if (constant) throw std::domain_error("moments: sample has zero variance");

  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= dn;

  double m2 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
  }
  if (m2 == 0.0) throw std::domain_error("moments: sample has zero variance");

  const double pop_std = std::sqrt(m2 / dn);
  const double s = std::sqrt(m2 / (dn - 1.0));

  double sum3 = 0.0;
  double sum4 = 0.0;
  for (double x : xs) {
    const double z = (x - mean) / s;
    const double z3 = z * z * z;
    sum3 += z3;
    sum4 += z3 * z;
  }

  const double skew = dn / ((dn - 1.0) * (dn - 2.0)) * sum3;
  const double kurt = dn * (dn + 1.0) / ((dn - 1.0) * (dn - 2.0) * (dn - 3.0)) * sum4 -
                      3.0 * (dn - 1.0) * (dn - 1.0) / ((dn - 2.0) * (dn - 3.0));

  return {mean, pop_std, skew, kurt};
}

// Normalized frequency of each distinct value; frequencies sum to 1.
inline std::map<std::int64_t, double> histogram(std::span<const std::int64_t> xs) {
  std::map<std::int64_t, double> out;
  if (xs.empty()) return out;
  for (std::int64_t x : xs) out[x] += 1.0;
  const double dn = static_cast<double>(xs.size());
  for (auto& [k, v] : out) v /= dn;
  return out;
}

}  // namespace snowsim
