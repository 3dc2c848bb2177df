#include "fslab/oracles.hpp"

namespace fslab {

Vec first_order_answer(const FiniteSumProblem& F, const Vec& w,
                       const FirstOrderQuery& q, CallMeter& meter) {
  if (q.i < 0 || q.i >= F.n()) throw FslabError("individual index out of range");
  if (q.A.rows() != F.d() || q.B.rows() != F.d() || q.c.size() != F.d())
    throw FslabError("query dimension mismatch");
  meter.charge();
  return q.A * F.individual_gradient(q.i, w) + q.B * w + q.c;
}

double coord_step_length(const QuadraticIndividual& f, const Vec& w, int j) {
  const double qjj = f.Q(j, j);
  if (qjj <= 0.0) throw FslabError("flat coordinate direction (Q_jj = 0)");
  return (f.b(j) - f.Q.row(j).dot(w)) / qjj;
}

Vec coord_descent_answer(const FiniteSumProblem& F, const Vec& w,
                         const CoordQuery& q, CallMeter& meter) {
  if (q.i < 0 || q.i >= F.n()) throw FslabError("individual index out of range");
  if (q.j < 0 || q.j >= F.d()) throw FslabError("coordinate index out of range");
  meter.charge();
  const double t = coord_step_length(F.quad(q.i), w, q.j);
  Vec out = w;
  out(q.j) += t;
  return out;
}

void HiddenHandle::check_domain(const Vec& w) const {
  if (unit_ball_ && w.norm() > 1.0 + 1e-12)
    throw FslabError("point outside the unit ball");
}

double HiddenHandle::value(const Vec& w) const {
  check_domain(w);
  return std::visit([&](const auto& g) { return g.value(w); }, *f_);
}

Vec HiddenHandle::gradient(const Vec& w) const {
  check_domain(w);
  if (const auto* q = std::get_if<QuadraticIndividual>(f_)) return q->gradient(w);
  return std::get<NormRegIndividual>(*f_).subgradient(w);
}

HiddenHandle stochastic_draw(const BiasPair& pair, int sigma,
                             std::mt19937_64& rng, CallMeter& meter) {
  if (sigma != 1 && sigma != -1) throw FslabError("sigma must be +-1");
  meter.charge();
  const double p_minus = (pair.n + sigma) / (2.0 * pair.n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const bool take_minus = u(rng) < p_minus;
  const bool unit_ball = pair.plus.meta().unit_ball;
  return HiddenHandle(take_minus ? &pair.f_minus : &pair.f_plus, unit_ball);
}

}  // namespace fslab
