#include "fslab/bias_reduction.hpp"

#include <cmath>

#include "fslab/cli_engine.hpp"
#include "fslab/oracles.hpp"

namespace fslab {

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw FslabError("p must lie in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double entropy_bound_margin(double p) {
  const double dev = p - 0.5;
  return binary_entropy(p) - (1.0 - 4.0 * dev * dev);
}

InfoBound info_lower_bound(long long n) {
  if (n < 1) throw FslabError("n must be >= 1");
  InfoBound b;
  b.bound = 0.5 * static_cast<double>(n) * static_cast<double>(n);
  const double gap = 1.0 - binary_entropy(0.5 + 1.0 / (2.0 * n));
  b.exact = 1.0 / (2.0 * gap);
  if (b.exact < b.bound)
    throw FslabError("entropy bound violated (should be impossible)");
  return b;
}

int sigma_estimator(const Vec& w, const BiasPair& pair) {
  const double gap_plus = pair.plus.suboptimality(w);
  const double gap_minus = pair.minus.suboptimality(w);
  return gap_plus <= gap_minus ? +1 : -1;
}

namespace {

// Project onto the unit ball (active only for the Lipschitz kind).
Vec project(const Vec& w, bool unit_ball) {
  if (!unit_ball) return w;
  const double norm = w.norm();
  if (norm <= 1.0) return w;
  return w / norm;
}

// 1-d exact-ish line search along coordinate j of the drawn function,
// using only handle evaluations.
double hidden_coord_step(const HiddenHandle& h, const Vec& w, int j, double lo,
                         double hi) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto g = [&](double t) {
    Vec x = w;
    x(j) += t;
    return h.value(x);
  };
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
    if (g1 <= g2) {
      hi = x2; x2 = x1; g2 = g1;
      x1 = hi - phi * (hi - lo); g1 = g(x1);
    } else {
      lo = x1; x1 = x2; g1 = g2;
      x2 = lo + phi * (hi - lo); g2 = g(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TrialOutcome run_bias_trial(const BiasPair& pair, long long k,
                            const std::string& solver, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  const int sigma = coin(rng) == 0 ? -1 : 1;
  const bool unit_ball = pair.plus.meta().unit_ball;
  const double L = pair.plus.meta().L;
  const auto mu = pair.plus.meta().mu;
  const int d = pair.d;

  Vec w = Vec::Zero(d);
  CallMeter meter;
  std::uniform_int_distribution<int> ucoord(0, d - 1);

  for (long long t = 0; t < k; ++t) {
    HiddenHandle h = stochastic_draw(pair, sigma, rng, meter);
    if (solver == "sdca_wd") {
      const int j = ucoord(rng);
      double lo, hi;
      if (unit_ball) {
        // Keep probes inside the ball: ||w + t e_j|| <= 1.
        const double rest = w.squaredNorm() - w(j) * w(j);
        const double span = std::sqrt(std::max(0.0, 1.0 - rest));
        lo = -w(j) - span;
        hi = -w(j) + span;
      } else {
        const double radius = 4.0 * (1.0 + std::abs(w(j)));
        lo = -radius;
        hi = radius;
      }
      w(j) += hidden_coord_step(h, w, j, lo, hi);
      w = project(w, unit_ball);
      continue;
    }
    double eta;
    if (solver == "gd") {
      eta = 1.0 / L;
    } else if (solver == "sag" || solver == "saga") {
      eta = 1.0 / (3.0 * L);
    } else if (solver == "svrg" || solver == "svrg_pp") {
      eta = 1.0 / (10.0 * L);
    } else if (solver == "sgd") {
      eta = mu ? std::min(1.0 / L, 2.0 / (*mu * (t + 1)))
               : 1.0 / (L * std::sqrt(static_cast<double>(t + 1)));
    } else {
      throw FslabError("unknown solver for bias trial: " + solver);
    }
    w = project(w - eta * h.gradient(w), unit_ball);
  }
  if (meter.count != k) throw FslabError("hidden-oracle accounting mismatch");

  TrialOutcome out;
  out.sigma = sigma;
  out.k = k;
  out.w_final = w;
  out.sigma_hat = sigma_estimator(w, pair);
  out.subopt_plus = pair.plus.suboptimality(w);
  out.subopt_minus = pair.minus.suboptimality(w);
  return out;
}

ErrorEstimate error_probability(const BiasPair& pair, long long k,
                                const std::string& solver, int trials,
                                uint64_t master_seed) {
  if (trials < 30) throw FslabError("need at least 30 trials");
  ErrorEstimate est;
  est.trials = trials;
  for (int t = 0; t < trials; ++t) {
    auto rng = trial_rng(master_seed, static_cast<uint64_t>(t));
    TrialOutcome out = run_bias_trial(pair, k, solver, rng);
    if (out.sigma_hat != out.sigma) ++est.errors;
  }
  est.err = static_cast<double>(est.errors) / trials;
  std::tie(est.ci_lo, est.ci_hi) = wilson_interval(est.errors, trials);
  return est;
}

ErrorEstimate error_probability_incremental(const BiasPair& pair,
                                            long long budget,
                                            const std::string& solver,
                                            int trials, uint64_t master_seed) {
  if (trials < 30) throw FslabError("need at least 30 trials");
  ErrorEstimate est;
  est.trials = trials;
  for (int t = 0; t < trials; ++t) {
    auto rng = trial_rng(master_seed, static_cast<uint64_t>(t) | (1ULL << 40));
    std::uniform_int_distribution<int> coin(0, 1);
    const int sigma = coin(rng) == 0 ? -1 : 1;
    const FiniteSumProblem& F = pair.problem(sigma);
    auto schedule = make_schedule(solver, {}, SideInfo::from(F, true));
    RunOptions opts;
    opts.record_every = 1 << 20;  // only the endpoint matters
    Trace trace = run(F, *schedule, budget, rng, opts);
    const int guess = sigma_estimator(trace.final_point, pair);
    if (guess != sigma) ++est.errors;
  }
  est.err = static_cast<double>(est.errors) / trials;
  std::tie(est.ci_lo, est.ci_hi) = wilson_interval(est.errors, trials);
  return est;
}

}  // namespace fslab
