#pragma once

#include <string>

#include "fslab/common.hpp"
#include "fslab/instances.hpp"

namespace fslab {

double binary_entropy(double p);

// H_b(p) - (1 - 4 (p - 1/2)^2); nonnegative on [0, 1].
double entropy_bound_margin(double p);

struct InfoBound {
  double exact;  // 1 / (2 (1 - H_b(1/2 + 1/(2n))))
  double bound;  // n^2 / 2
};

InfoBound info_lower_bound(long long n);

// argmin over sigma' of F_sigma'(w) - F*_sigma'; ties resolve to +1.
int sigma_estimator(const Vec& w, const BiasPair& pair);

struct TrialOutcome {
  int sigma = 0;
  long long k = 0;
  Vec w_final;
  int sigma_hat = 0;
  double subopt_plus = 0.0;
  double subopt_minus = 0.0;
};

// One hidden-index trial: sigma drawn uniformly, the solver sees only
// evaluation handles for exactly k oracle draws, then sigma is guessed
// from the final point.
TrialOutcome run_bias_trial(const BiasPair& pair, long long k,
                            const std::string& solver, std::mt19937_64& rng);

struct ErrorEstimate {
  double err = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
  int trials = 0;
  int errors = 0;
};

ErrorEstimate error_probability(const BiasPair& pair, long long k,
                                const std::string& solver, int trials,
                                uint64_t master_seed);

// Control arm: the same guessing game, but the solver runs on F_sigma with
// the incremental (index-visible) oracle.
ErrorEstimate error_probability_incremental(const BiasPair& pair,
                                            long long budget,
                                            const std::string& solver,
                                            int trials, uint64_t master_seed);

}  // namespace fslab
