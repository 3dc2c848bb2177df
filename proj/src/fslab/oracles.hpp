#pragma once

#include <random>

#include "fslab/common.hpp"
#include "fslab/instances.hpp"

namespace fslab {

// Counts individual-function evaluations.
struct CallMeter {
  long long count = 0;
  void charge(long long m = 1) { count += m; }
};

// Answer: A grad f_i(w) + B w + c.
struct FirstOrderQuery {
  Mat A;
  Mat B;
  Vec c;
  int i = 0;
};

// Answer: w + t* e_j, t* the exact minimizer of f_i along coordinate j.
struct CoordQuery {
  int j = 0;
  int i = 0;
};

Vec first_order_answer(const FiniteSumProblem& F, const Vec& w,
                       const FirstOrderQuery& q, CallMeter& meter);

Vec coord_descent_answer(const FiniteSumProblem& F, const Vec& w,
                         const CoordQuery& q, CallMeter& meter);

// Exact coordinate step length for a quadratic individual.
double coord_step_length(const QuadraticIndividual& f, const Vec& w, int j);

// Evaluation-only access to a drawn individual; the index stays hidden.
class HiddenHandle {
 public:
  HiddenHandle(const Individual* f, bool unit_ball)
      : f_(f), unit_ball_(unit_ball) {}

  double value(const Vec& w) const;
  Vec gradient(const Vec& w) const;

 private:
  void check_domain(const Vec& w) const;
  const Individual* f_;
  bool unit_ball_;
};

// Draws f- with probability (n+sigma)/(2n), f+ otherwise.
HiddenHandle stochastic_draw(const BiasPair& pair, int sigma,
                             std::mt19937_64& rng, CallMeter& meter);

}  // namespace fslab
