#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace fslab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class FslabError : public std::runtime_error {
 public:
  explicit FslabError(const std::string& msg) : std::runtime_error(msg) {}
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based per-trial seeding: trials are reproducible and
// order-independent given (master_seed, trial_id).
inline std::mt19937_64 trial_rng(uint64_t master_seed, uint64_t trial_id) {
  return std::mt19937_64(splitmix64(master_seed ^ splitmix64(trial_id)));
}

// Wilson 95% score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(int successes, int total) {
  if (total <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double p = static_cast<double>(successes) / total;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / total;
  const double center = (p + z2 / (2.0 * total)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace fslab
