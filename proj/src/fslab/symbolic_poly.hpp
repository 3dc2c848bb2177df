#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fslab/cli_engine.hpp"
#include "fslab/common.hpp"

namespace fslab {

using Rational = boost::multiprecision::cpp_rational;

// Exact rational image of a double (every finite double is rational).
Rational rational_from_double(double x);

// Univariate polynomial in mu with exact rational coefficients.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(Rational constant);
  static UniPoly zero() { return UniPoly(); }

  // Degree of the zero polynomial is -1; bookkeeping is exact.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const Rational& coeff(int i) const;

  UniPoly& operator+=(const UniPoly& other);
  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  UniPoly scaled(const Rational& s) const;
  UniPoly times_mu() const;
  // Multiply by (a0 + a1 * mu).
  UniPoly times_affine(const Rational& a0, const Rational& a1) const;

  Rational eval(const Rational& mu) const;
  double eval_double(double mu) const;

  std::string to_string() const;

 private:
  void trim();
  std::vector<Rational> coeffs_;  // coeffs_[i] multiplies mu^i
};

struct PolyVector {
  std::vector<UniPoly> entries;
  long long k = 0;

  int max_degree() const;
  Vec eval_double(double mu) const;
};

// The unknown-mu quadratic family in symbolic form; all scalars are exact
// rational images of the doubles the numeric path uses.
struct SymbolicFamily {
  double L = 1.0;
  double q_coeff = 0.0;  // eps * R / sqrt(2)
  int d = 2;
  int n = 1;
};

// One generalized first-order answer a (Q_mu v - q) + b v, exact in mu.
PolyVector poly_combine(const SymbolicFamily& fam, const PolyVector& v,
                        const Rational& a, const Rational& b);

// Executes an oblivious schedule over the family, representing every iterate
// coordinate of slot 1 as a polynomial in mu. Schedules whose parameters read
// mu are rejected; so are coordinate queries on the two coupled coordinates
// (their exact answers are not polynomial in mu).
PolyVector symbolic_run(const SymbolicFamily& fam, Schedule& schedule,
                        long long k, uint64_t seed);

struct ExpectedPoly {
  UniPoly mean;                     // exact coefficient-wise average
  std::vector<double> coeff_se;     // standard error per coefficient
  int trials = 0;
};

// First coordinate of the expected iterate; deterministic schedules need a
// single trial, stochastic ones are averaged over seeds.
ExpectedPoly expected_first_coord(const SymbolicFamily& fam,
                                  const ScheduleFactory& factory, long long k,
                                  int trials, uint64_t master_seed);

struct EnvelopeReport {
  bool found = false;
  double delta = 0.0;
  double min_ratio = 0.0;   // min over the grid of |s(mu) mu + 1| / (1-mu/L)^(k+1)
  double worst_mu = 0.0;
};

// Searches delta = L/2, L/4, ... down to 1e-12 for an interval (L-delta, L)
// on which |s(mu) mu + 1| >= (1 - mu/L)^(k+1) holds on a 1000-point grid.
EnvelopeReport envelope_margin(const UniPoly& s, double L, long long k);

// (R eps / (sqrt(2) L)) (1 - mu/L)^(k+1)
double suboptimality_envelope(double mu, double eps, double R, double L,
                              long long k);

}  // namespace fslab
