#include "fslab/cli_engine.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace fslab {

SideInfo SideInfo::from(const FiniteSumProblem& F, bool with_mu) {
  SideInfo s;
  s.L = F.meta().L;
  if (with_mu) s.mu = F.meta().mu;
  s.n = F.n();
  s.d = F.d();
  return s;
}

bool operator==(const StepPlan& a, const StepPlan& b) {
  return plan_to_string(a) == plan_to_string(b);
}

std::string plan_to_string(const StepPlan& plan) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& slot : plan.slots) {
    os << "[";
    for (const auto& g : slot.grads)
      os << "g(" << g.src << "," << g.a << "," << g.b << "," << g.i << ")";
    for (const auto& l : slot.lins) os << "l(" << l.src << "," << l.b << ")";
    for (const auto& c : slot.coords)
      os << "c(" << c.src << "," << c.j << "," << c.i << ")";
    os << "]";
  }
  return os.str();
}

void Schedule::init_state(std::vector<Vec>& slots, const Vec& w0) const {
  slots.assign(num_slots_, w0);
}

std::string Schedule::descriptor() const {
  std::ostringstream os;
  os << "{\"name\":\"" << name_ << "\",\"L\":" << side_.L << ",\"n\":" << side_.n
     << ",\"d\":" << side_.d;
  if (side_.mu && reads_mu_) os << ",\"mu\":" << *side_.mu;
  os << ",\"slots\":" << num_slots_ << ",\"stationary\":" << stationary_ << "}";
  return os.str();
}

namespace {

void validate_one_individual(const StepPlan& plan) {
  std::set<int> touched;
  for (const auto& slot : plan.slots) {
    for (const auto& g : slot.grads)
      if (g.a != 0.0) touched.insert(g.i);
    for (const auto& c : slot.coords) touched.insert(c.i);
  }
  if (touched.size() > 1)
    throw FslabError("plan accesses more than one individual in an iteration");
}

}  // namespace

void apply_plan(SolverState& state, const StepPlan& plan,
                const FiniteSumProblem& F, CallMeter& meter) {
  if (static_cast<int>(plan.slots.size()) != static_cast<int>(state.slots.size()))
    throw FslabError("plan/state slot count mismatch");
  validate_one_individual(plan);

  const int d = F.d();
  std::vector<Vec> next(plan.slots.size(), Vec::Zero(d));
  for (size_t t = 0; t < plan.slots.size(); ++t) {
    Vec& acc = next[t];
    for (const auto& l : plan.slots[t].lins) acc += l.b * state.slots.at(l.src);
    for (const auto& g : plan.slots[t].grads) {
      const Vec& w = state.slots.at(g.src);
      if (g.a != 0.0) {
        meter.charge();
        acc += g.a * F.individual_gradient(g.i, w);
      }
      if (g.b != 0.0) acc += g.b * w;
    }
    for (const auto& c : plan.slots[t].coords) {
      meter.charge();
      const Vec& w = state.slots.at(c.src);
      const double step = coord_step_length(F.quad(c.i), w, c.j);
      acc += w;
      acc(c.j) += step;
    }
  }
  state.slots = std::move(next);
  state.k += 1;
}

std::string Trace::to_csv() const {
  std::string out = "k,calls,subopt,dist\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,%.17g,%.17g\n", r.k, r.calls,
                  r.subopt, r.dist);
    out += buf;
  }
  return out;
}

namespace {

TraceRow observe(const FiniteSumProblem& F, const SolverState& state,
                 long long calls) {
  TraceRow row;
  row.k = state.k;
  row.calls = calls;
  row.subopt = F.suboptimality(state.solution());
  row.dist = F.distance_to_opt(state.solution());
  return row;
}

}  // namespace

Trace run(const FiniteSumProblem& F, Schedule& schedule, long long budget,
          std::mt19937_64& rng, const RunOptions& opts) {
  if (budget < 0) throw FslabError("budget must be >= 0");
  SolverState state;
  schedule.init_state(state.slots, Vec::Zero(F.d()));
  CallMeter meter;

  Trace trace;
  trace.rows.push_back(observe(F, state, meter.count));
  int k_sched = 0;
  while (meter.count < budget) {
    StepPlan plan = schedule.plan(k_sched, rng);
    if (opts.plan_log) opts.plan_log->push_back(plan);
    apply_plan(state, plan, F, meter);
    ++k_sched;
    const bool record = (state.k % std::max<long long>(1, opts.record_every)) == 0;
    TraceRow row;
    bool have_row = false;
    if (record || meter.count >= budget) {
      row = observe(F, state, meter.count);
      trace.rows.push_back(row);
      have_row = true;
    }
    if (opts.stop_below_subopt) {
      if (!have_row) row = observe(F, state, meter.count);
      if (row.subopt <= *opts.stop_below_subopt) {
        if (!have_row) trace.rows.push_back(row);
        break;
      }
    }
  }
  trace.final_point = state.solution();
  trace.total_calls = meter.count;
  return trace;
}

RestartReport run_restarted(const FiniteSumProblem& F,
                            const ScheduleFactory& base, double C, double alpha,
                            double mu, int epochs, const Vec& w0,
                            std::mt19937_64& rng, const RunOptions& opts) {
  if (mu <= 0.0) throw FslabError("restart needs mu > 0");
  if (C <= 0.0 || alpha <= 0.0) throw FslabError("restart needs a (C, alpha) certificate");

  const long long T =
      static_cast<long long>(std::ceil(std::pow(4.0 * C / mu, 1.0 / alpha)));

  RestartReport report;
  report.epoch_length = T;

  CallMeter meter;
  Vec warm = w0;
  SolverState state;
  long long global_k = 0;

  report.epoch_subopt.push_back(F.suboptimality(warm));
  report.trace.rows.push_back(
      TraceRow{0, 0, F.suboptimality(warm), F.distance_to_opt(warm)});

  for (int e = 0; e < epochs; ++e) {
    auto schedule = base();
    schedule->init_state(state.slots, warm);
    for (long long t = 0; t < T; ++t) {
      StepPlan plan = schedule->plan(static_cast<int>(t), rng);
      if (opts.plan_log) opts.plan_log->push_back(plan);
      apply_plan(state, plan, F, meter);
      ++global_k;
      if (global_k % std::max<long long>(1, opts.record_every) == 0) {
        report.trace.rows.push_back(TraceRow{global_k, meter.count,
                                             F.suboptimality(state.solution()),
                                             F.distance_to_opt(state.solution())});
      }
    }
    warm = state.solution();
    report.epoch_subopt.push_back(F.suboptimality(warm));
  }
  report.trace.final_point = warm;
  report.trace.total_calls = meter.count;
  return report;
}

}  // namespace fslab
