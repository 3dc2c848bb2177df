#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fslab/common.hpp"

namespace fslab {

// f(w) = 1/2 w^T Q w - b^T w + c
struct QuadraticIndividual {
  Mat Q;
  Vec b;
  double c = 0.0;

  double value(const Vec& w) const;
  Vec gradient(const Vec& w) const;
};

// f(w) = M ||w + shift|| + lambda/2 ||w||^2, restricted to the unit ball.
struct NormRegIndividual {
  double M = 0.0;
  double lambda = 0.0;
  Vec shift;

  double value(const Vec& w) const;
  // Subgradient; the norm term contributes 0 at its kink.
  Vec subgradient(const Vec& w) const;
};

using Individual = std::variant<QuadraticIndividual, NormRegIndividual>;

struct ProblemMeta {
  double L = 0.0;                // smoothness (or M + lambda for the norm kind)
  std::optional<double> mu;      // strong convexity, when declared
  int n = 0;
  int d = 0;
  bool unit_ball = false;
};

class FiniteSumProblem {
 public:
  FiniteSumProblem(std::vector<Individual> individuals, ProblemMeta meta,
                   std::optional<Vec> w_star = std::nullopt);

  int n() const { return meta_.n; }
  int d() const { return meta_.d; }
  const ProblemMeta& meta() const { return meta_; }
  bool quadratic() const { return quadratic_; }

  double individual_value(int i, const Vec& w) const;
  Vec individual_gradient(int i, const Vec& w) const;
  const QuadraticIndividual& quad(int i) const;
  const Individual& individual(int i) const { return individuals_[i]; }

  double value(const Vec& w) const;
  Vec gradient(const Vec& w) const;

  bool has_minimizer() const { return w_star_.has_value(); }
  const Vec& minimizer() const;
  double optimal_value() const;
  double suboptimality(const Vec& w) const { return value(w) - optimal_value(); }
  double distance_to_opt(const Vec& w) const { return (w - minimizer()).norm(); }

  void check_domain(const Vec& w) const;

  // Averaged quadratic data: value(w) = 1/2 w^T Qbar w - bbar^T w + cbar.
  const Mat& averaged_Q() const;
  const Vec& averaged_b() const;

  std::string serialize() const;

 private:
  std::vector<Individual> individuals_;
  ProblemMeta meta_;
  bool quadratic_ = false;
  std::optional<Vec> w_star_;
  std::optional<double> f_star_;
  Mat Qbar_;
  Vec bbar_;
  double cbar_ = 0.0;
};

struct EvalResult {
  double value;
  Vec gradient;
  std::vector<double> individual_values;
};

EvalResult evaluate(const FiniteSumProblem& F, const Vec& w);

enum class PairKind { smooth_sc, smooth_cvx, lipschitz_sc };

const char* pair_kind_name(PairKind kind);
PairKind pair_kind_from_name(const std::string& name);

struct BiasPairParams {
  double kappa = 0.0;   // smooth_sc
  double L = 0.0;       // smooth_cvx
  double M = 0.0;       // lipschitz_sc
  double lambda = 0.0;  // lipschitz_sc
};

// The sigma-indexed pair F_{+1}, F_{-1} with mixture weights (n-sigma)/2 on
// f+ and (n+sigma)/2 on f-.
struct BiasPair {
  PairKind kind;
  int n = 0;
  int d = 0;
  BiasPairParams params;
  Individual f_plus;
  Individual f_minus;
  FiniteSumProblem plus;   // F_{+1}
  FiniteSumProblem minus;  // F_{-1}

  const FiniteSumProblem& problem(int sigma) const {
    return sigma > 0 ? plus : minus;
  }
  std::string serialize() const;
};

BiasPair make_bias_pair(PairKind kind, int n, const BiasPairParams& params,
                        int d = 2);

double delta_gap_closed(const BiasPair& pair);
double delta_gap_numeric(const BiasPair& pair);

FiniteSumProblem make_unknown_mu_problem(double L, double mu, double eps,
                                         double R, int d, int n);

// Curvature split of the unknown-mu family: Q_mu = Q0 + mu * Q1.
void unknown_mu_split(double L, int d, Mat& Q0, Mat& Q1);
// Linear-term coefficient of the family: q = coeff * (1,1,0,...,0).
double unknown_mu_q_coeff(double eps, double R);

}  // namespace fslab
