#include "fslab/instances.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace fslab {

using nlohmann::json;

double QuadraticIndividual::value(const Vec& w) const {
  return 0.5 * w.dot(Q * w) - b.dot(w) + c;
}

Vec QuadraticIndividual::gradient(const Vec& w) const { return Q * w - b; }

double NormRegIndividual::value(const Vec& w) const {
  return M * (w + shift).norm() + 0.5 * lambda * w.squaredNorm();
}

Vec NormRegIndividual::subgradient(const Vec& w) const {
  Vec u = w + shift;
  const double norm = u.norm();
  Vec g = lambda * w;
  if (norm > 0.0) g += (M / norm) * u;
  return g;
}

namespace {

double individual_value_impl(const Individual& f, const Vec& w) {
  return std::visit([&](const auto& g) { return g.value(w); }, f);
}

Vec individual_gradient_impl(const Individual& f, const Vec& w) {
  if (const auto* q = std::get_if<QuadraticIndividual>(&f)) return q->gradient(w);
  return std::get<NormRegIndividual>(f).subgradient(w);
}

}  // namespace

FiniteSumProblem::FiniteSumProblem(std::vector<Individual> individuals,
                                   ProblemMeta meta, std::optional<Vec> w_star)
    : individuals_(std::move(individuals)), meta_(meta), w_star_(std::move(w_star)) {
  if (individuals_.empty()) throw FslabError("problem needs n >= 1 individuals");
  meta_.n = static_cast<int>(individuals_.size());
  quadratic_ = std::holds_alternative<QuadraticIndividual>(individuals_.front());
  for (const auto& f : individuals_) {
    if (std::holds_alternative<QuadraticIndividual>(f) != quadratic_)
      throw FslabError("individuals must all share the same form");
  }
  if (quadratic_) {
    const int d = meta_.d;
    Qbar_ = Mat::Zero(d, d);
    bbar_ = Vec::Zero(d);
    for (const auto& f : individuals_) {
      const auto& q = std::get<QuadraticIndividual>(f);
      if (q.Q.rows() != d || q.Q.cols() != d || q.b.size() != d)
        throw FslabError("individual dimension mismatch");
      if ((q.Q - q.Q.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw FslabError("Q must be symmetric");
      Eigen::SelfAdjointEigenSolver<Mat> es(q.Q, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -1e-9 ||
          es.eigenvalues().maxCoeff() > meta_.L + 1e-9)
        throw FslabError("individual spectrum outside [0, L]");
      Qbar_ += q.Q;
      bbar_ += q.b;
      cbar_ += q.c;
    }
    Qbar_ /= meta_.n;
    bbar_ /= meta_.n;
    cbar_ /= meta_.n;
  }
  if (w_star_) f_star_ = value(*w_star_);
}

double FiniteSumProblem::individual_value(int i, const Vec& w) const {
  check_domain(w);
  return individual_value_impl(individuals_.at(i), w);
}

Vec FiniteSumProblem::individual_gradient(int i, const Vec& w) const {
  check_domain(w);
  return individual_gradient_impl(individuals_.at(i), w);
}

const QuadraticIndividual& FiniteSumProblem::quad(int i) const {
  if (!quadratic_) throw FslabError("not a quadratic problem");
  return std::get<QuadraticIndividual>(individuals_.at(i));
}

double FiniteSumProblem::value(const Vec& w) const {
  check_domain(w);
  double s = 0.0;
  for (const auto& f : individuals_) s += individual_value_impl(f, w);
  return s / meta_.n;
}

Vec FiniteSumProblem::gradient(const Vec& w) const {
  check_domain(w);
  Vec g = Vec::Zero(meta_.d);
  for (const auto& f : individuals_) g += individual_gradient_impl(f, w);
  return g / meta_.n;
}

const Vec& FiniteSumProblem::minimizer() const {
  if (!w_star_) throw FslabError("no closed-form minimizer attached");
  return *w_star_;
}

double FiniteSumProblem::optimal_value() const {
  if (!f_star_) throw FslabError("no closed-form minimizer attached");
  return *f_star_;
}

void FiniteSumProblem::check_domain(const Vec& w) const {
  if (meta_.unit_ball && w.norm() > 1.0 + 1e-12)
    throw FslabError("point outside the unit ball");
}

const Mat& FiniteSumProblem::averaged_Q() const {
  if (!quadratic_) throw FslabError("not a quadratic problem");
  return Qbar_;
}

const Vec& FiniteSumProblem::averaged_b() const {
  if (!quadratic_) throw FslabError("not a quadratic problem");
  return bbar_;
}

namespace {

json vec_to_json(const Vec& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json mat_to_json(const Mat& m) {
  std::vector<double> flat;
  flat.reserve(m.size());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

json individual_to_json(const Individual& f) {
  if (const auto* q = std::get_if<QuadraticIndividual>(&f)) {
    return json{{"form", "quadratic"},
                {"Q", mat_to_json(q->Q)},
                {"b", vec_to_json(q->b)},
                {"c", q->c}};
  }
  const auto& nr = std::get<NormRegIndividual>(f);
  return json{{"form", "norm_reg"},
              {"M", nr.M},
              {"lambda", nr.lambda},
              {"shift", vec_to_json(nr.shift)}};
}

}  // namespace

std::string FiniteSumProblem::serialize() const {
  json j;
  j["n"] = meta_.n;
  j["d"] = meta_.d;
  j["L"] = meta_.L;
  if (meta_.mu) j["mu"] = *meta_.mu;
  j["unit_ball"] = meta_.unit_ball;
  json inds = json::array();
  for (const auto& f : individuals_) inds.push_back(individual_to_json(f));
  j["individuals"] = inds;
  if (w_star_) j["minimizer"] = vec_to_json(*w_star_);
  return j.dump(2);
}

EvalResult evaluate(const FiniteSumProblem& F, const Vec& w) {
  EvalResult r;
  r.gradient = F.gradient(w);
  r.individual_values.reserve(F.n());
  double s = 0.0;
  for (int i = 0; i < F.n(); ++i) {
    r.individual_values.push_back(F.individual_value(i, w));
    s += r.individual_values.back();
  }
  r.value = s / F.n();
  return r;
}

const char* pair_kind_name(PairKind kind) {
  switch (kind) {
    case PairKind::smooth_sc: return "smooth_sc";
    case PairKind::smooth_cvx: return "smooth_cvx";
    case PairKind::lipschitz_sc: return "lipschitz_sc";
  }
  return "?";
}

PairKind pair_kind_from_name(const std::string& name) {
  if (name == "smooth_sc") return PairKind::smooth_sc;
  if (name == "smooth_cvx") return PairKind::smooth_cvx;
  if (name == "lipschitz_sc") return PairKind::lipschitz_sc;
  throw FslabError("unknown pair kind: " + name);
}

namespace {

FiniteSumProblem mix_problem(const Individual& f_plus, const Individual& f_minus,
                             int n, int sigma, const ProblemMeta& meta,
                             const Vec& w_star) {
  std::vector<Individual> individuals;
  individuals.reserve(n);
  const int n_plus = (n - sigma) / 2;
  for (int i = 0; i < n_plus; ++i) individuals.push_back(f_plus);
  for (int i = n_plus; i < n; ++i) individuals.push_back(f_minus);
  return FiniteSumProblem(std::move(individuals), meta, w_star);
}

}  // namespace

BiasPair make_bias_pair(PairKind kind, int n, const BiasPairParams& params,
                        int d) {
  if (n < 1 || n % 2 == 0) throw FslabError("bias pair needs odd n >= 1");
  d = std::max(2, d);

  Individual f_plus, f_minus;
  ProblemMeta meta;
  meta.d = d;
  Vec w_star_unit;  // minimizer of F_{+1}; F_{-1} is its mirror

  switch (kind) {
    case PairKind::smooth_sc: {
      if (params.kappa < 1.0) throw FslabError("smooth_sc needs kappa >= 1");
      Vec a = Vec::Ones(d);
      a(0) = params.kappa;
      Mat A = a.asDiagonal();
      Vec q = Vec::Zero(d);
      q(0) = 1.0;
      q(1) = 1.0;
      const double offset = 0.5 * q.dot(A * q);
      // f_pm(w) = 1/2 (w +- q)^T A (w +- q)
      f_plus = QuadraticIndividual{A, -(A * q), offset};
      f_minus = QuadraticIndividual{A, A * q, offset};
      meta.L = params.kappa;
      meta.mu = 1.0;
      w_star_unit = q / n;
      break;
    }
    case PairKind::smooth_cvx: {
      if (params.L <= 0.0) throw FslabError("smooth_cvx needs L > 0");
      Mat Q = params.L * Mat::Identity(d, d);
      Vec e1 = Vec::Unit(d, 0);
      f_plus = QuadraticIndividual{Q, -params.L * e1, 0.5 * params.L};
      f_minus = QuadraticIndividual{Q, params.L * e1, 0.5 * params.L};
      meta.L = params.L;
      w_star_unit = e1 / n;
      break;
    }
    case PairKind::lipschitz_sc: {
      if (params.M <= 0.0 || params.lambda <= 0.0)
        throw FslabError("lipschitz_sc needs M, lambda > 0");
      Vec e1 = Vec::Unit(d, 0);
      f_plus = NormRegIndividual{params.M, params.lambda, e1};
      f_minus = NormRegIndividual{params.M, params.lambda, -e1};
      meta.L = params.M + params.lambda;
      meta.mu = params.lambda;
      meta.unit_ball = true;
      w_star_unit = std::min(params.M / (params.lambda * n), 1.0) * e1;
      break;
    }
  }

  FiniteSumProblem plus = mix_problem(f_plus, f_minus, n, +1, meta, w_star_unit);
  FiniteSumProblem minus =
      mix_problem(f_plus, f_minus, n, -1, meta, -w_star_unit);
  return BiasPair{kind,      n,     d,     params,
                  f_plus,    f_minus,
                  std::move(plus), std::move(minus)};
}

std::string BiasPair::serialize() const {
  json j;
  j["kind"] = pair_kind_name(kind);
  j["n"] = n;
  j["d"] = d;
  switch (kind) {
    case PairKind::smooth_sc: j["kappa"] = params.kappa; break;
    case PairKind::smooth_cvx: j["L"] = params.L; break;
    case PairKind::lipschitz_sc:
      j["M"] = params.M;
      j["lambda"] = params.lambda;
      break;
  }
  j["F_plus"] = json::parse(plus.serialize());
  j["F_minus"] = json::parse(minus.serialize());
  return j.dump(2);
}

double delta_gap_closed(const BiasPair& pair) {
  const int n = pair.n;
  switch (pair.kind) {
    case PairKind::smooth_sc:
      return (pair.params.kappa + 1.0) / (static_cast<double>(n) * n);
    case PairKind::smooth_cvx:
      return pair.params.L / (static_cast<double>(n) * n);
    case PairKind::lipschitz_sc: {
      const double M = pair.params.M, lambda = pair.params.lambda;
      if (M / (lambda * n) <= 1.0)
        return M * M / (lambda * static_cast<double>(n) * n);
      return 2.0 * M / n - lambda;
    }
  }
  throw FslabError("unreachable");
}

double delta_gap_numeric(const BiasPair& pair) {
  const FiniteSumProblem& Fp = pair.plus;
  const FiniteSumProblem& Fm = pair.minus;
  const double base = Fp.optimal_value() + Fm.optimal_value();
  if (Fp.quadratic()) {
    // Stationarity of F_1 + F_{-1}: (Q_p + Q_m) w = b_p + b_m, solved exactly.
    Mat Q = Fp.averaged_Q() + Fm.averaged_Q();
    Vec b = Fp.averaged_b() + Fm.averaged_b();
    Vec w = Q.ldlt().solve(b);
    return Fp.value(w) + Fm.value(w) - base;
  }
  // 1-d reduction along e1, minimized by golden-section search.
  auto g = [&](double t) {
    Vec w = Vec::Zero(pair.d);
    w(0) = t;
    return Fp.value(w) + Fm.value(w) - base;
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = -1.0, hi = 1.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  int iters = 0;
  while (hi - lo > 1e-10 && iters < 200) {
    if (g1 <= g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - phi * (hi - lo);
      g1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + phi * (hi - lo);
      g2 = g(x2);
    }
    ++iters;
  }
  if (hi - lo > 1e-10)
    throw FslabError("1-d search failed to converge to tolerance");
  return g(0.5 * (lo + hi));
}

void unknown_mu_split(double L, int d, Mat& Q0, Mat& Q1) {
  Q0 = Mat::Zero(d, d);
  Q1 = Mat::Zero(d, d);
  Q0(0, 0) = Q0(1, 1) = L / 2.0;
  Q0(0, 1) = Q0(1, 0) = -L / 2.0;
  Q1(0, 0) = Q1(1, 1) = 0.5;
  Q1(0, 1) = Q1(1, 0) = 0.5;
  for (int i = 2; i < d; ++i) Q1(i, i) = 1.0;
}

double unknown_mu_q_coeff(double eps, double R) {
  return eps * R / std::sqrt(2.0);
}

FiniteSumProblem make_unknown_mu_problem(double L, double mu, double eps,
                                         double R, int d, int n) {
  if (!(0.0 < eps && eps < mu && mu < L))
    throw FslabError("need 0 < eps < mu < L");
  if (n < 1) throw FslabError("need n >= 1");
  d = std::max(2, d);

  Mat Q0, Q1;
  unknown_mu_split(L, d, Q0, Q1);
  Mat Q = Q0 + mu * Q1;
  const double qc = unknown_mu_q_coeff(eps, R);
  Vec b = Vec::Zero(d);
  b(0) = qc;
  b(1) = qc;

  QuadraticIndividual f{Q, b, 0.0};
  std::vector<Individual> individuals(n, Individual(f));

  ProblemMeta meta;
  meta.L = L;
  meta.mu = mu;
  meta.d = d;

  Vec w_star = Vec::Zero(d);
  w_star(0) = qc / mu;
  w_star(1) = qc / mu;
  return FiniteSumProblem(std::move(individuals), meta, w_star);
}

}  // namespace fslab
