#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fslab/instances.hpp"
#include "fslab/oracles.hpp"

using namespace fslab;

namespace {

FiniteSumProblem test_problem() {
  return make_unknown_mu_problem(1.0, 0.5, 0.1, 1.0, 2, 1);
}

}  // namespace

TEST_CASE("identity first-order query returns the individual gradient") {
  auto F = test_problem();
  Vec w(2);
  w << 0.3, -0.2;

  FirstOrderQuery q;
  q.A = Mat::Identity(2, 2);
  q.B = Mat::Zero(2, 2);
  q.c = Vec::Zero(2);
  q.i = 0;

  CallMeter meter;
  Vec ans = first_order_answer(F, w, q, meter);
  CHECK((ans - F.individual_gradient(0, w)).norm() < 1e-15);
  CHECK(meter.count == 1);
}

TEST_CASE("affine part of a first-order query") {
  auto F = test_problem();
  Vec w(2);
  w << 0.3, -0.2;

  FirstOrderQuery q;
  q.A = 2.0 * Mat::Identity(2, 2);
  q.B = -0.5 * Mat::Identity(2, 2);
  q.c = Vec::Ones(2);
  q.i = 0;

  CallMeter meter;
  Vec ans = first_order_answer(F, w, q, meter);
  Vec expect = 2.0 * F.individual_gradient(0, w) - 0.5 * w + Vec::Ones(2);
  CHECK((ans - expect).norm() < 1e-15);
}

TEST_CASE("coordinate step length at the origin") {
  auto F = test_problem();
  Vec w = Vec::Zero(2);
  // t* = b_j / Q_jj = (0.1/sqrt(2)) / ((1 + 0.5)/2)
  const double expect = (0.1 / std::sqrt(2.0)) / 0.75;
  CHECK(coord_step_length(F.quad(0), w, 1) == doctest::Approx(expect));
  CHECK(expect == doctest::Approx(0.0942809).epsilon(1e-5));
}

TEST_CASE("coordinate answer minimizes along the coordinate") {
  auto F = test_problem();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 0.5);

  for (int trial = 0; trial < 5; ++trial) {
    Vec w(2);
    w << g(rng), g(rng);
    for (int j = 0; j < 2; ++j) {
      CoordQuery q{j, 0};
      CallMeter meter;
      Vec ans = coord_descent_answer(F, w, q, meter);
      CHECK(meter.count == 1);
      const double best = F.individual_value(0, ans);
      for (int s = 0; s <= 1000; ++s) {
        Vec probe = w;
        probe(j) += -2.0 + 4.0 * s / 1000.0;
        CHECK(F.individual_value(0, probe) >= best - 1e-12);
      }
    }
  }
}

TEST_CASE("coordinate oracle rejects flat coordinates") {
  Mat Q = Mat::Zero(2, 2);
  Q(0, 0) = 1.0;
  QuadraticIndividual f{Q, Vec::Zero(2), 0.0};
  CHECK_THROWS_AS(coord_step_length(f, Vec::Zero(2), 1), FslabError);
}

TEST_CASE("hidden draw frequency matches (n + sigma) / (2n)") {
  BiasPairParams p;
  p.kappa = 4.0;
  auto pair = make_bias_pair(PairKind::smooth_sc, 5, p);

  // f- and f+ differ at w = e1: identify the drawn side by its value.
  Vec probe = Vec::Unit(2, 0);
  const double v_minus =
      std::visit([&](const auto& f) { return f.value(probe); }, pair.f_minus);

  for (int sigma : {-1, +1}) {
    std::mt19937_64 rng(42 + sigma);
    CallMeter meter;
    const int draws = 100000;
    int minus_count = 0;
    for (int t = 0; t < draws; ++t) {
      HiddenHandle h = stochastic_draw(pair, sigma, rng, meter);
      if (h.value(probe) == v_minus) ++minus_count;
    }
    CHECK(meter.count == draws);
    const double expect = (pair.n + sigma) / (2.0 * pair.n);
    const double se = std::sqrt(expect * (1.0 - expect) / draws);
    CHECK(std::abs(static_cast<double>(minus_count) / draws - expect) <
          4.0 * se);
  }
}

TEST_CASE("hidden handle exposes evaluations only") {
  BiasPairParams p;
  p.kappa = 4.0;
  auto pair = make_bias_pair(PairKind::smooth_sc, 3, p);
  std::mt19937_64 rng(1);
  CallMeter meter;
  HiddenHandle h = stochastic_draw(pair, +1, rng, meter);

  Vec w(2);
  w << 0.1, 0.2;
  const double v = h.value(w);
  Vec g = h.gradient(w);
  const double vp =
      std::visit([&](const auto& f) { return f.value(w); }, pair.f_plus);
  const double vm =
      std::visit([&](const auto& f) { return f.value(w); }, pair.f_minus);
  CHECK((v == vp || v == vm));
  CHECK(g.size() == 2);
}

TEST_CASE("out-of-range query index throws") {
  auto F = test_problem();
  FirstOrderQuery q;
  q.A = Mat::Identity(2, 2);
  q.B = Mat::Zero(2, 2);
  q.c = Vec::Zero(2);
  q.i = 5;
  CallMeter meter;
  CHECK_THROWS_AS(first_order_answer(F, Vec::Zero(2), q, meter), FslabError);
}
