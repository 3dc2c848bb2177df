#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fslab/common.hpp"
#include "fslab/instances.hpp"
#include "fslab/oracles.hpp"

namespace fslab {

struct SideInfo {
  double L = 0.0;
  std::optional<double> mu;
  int n = 0;
  int d = 0;

  static SideInfo from(const FiniteSumProblem& F, bool with_mu);
};

// One oracle answer contributing to a target slot. Matrices are scalar
// multiples of the identity: a * grad f_i(w_src) + b * w_src.
struct GradTerm {
  int src = 0;
  double a = 0.0;
  double b = 0.0;
  int i = 0;
};

// Free affine contribution b * w_src (a first-order query with A = 0; it
// evaluates no individual and is not charged).
struct LinTerm {
  int src = 0;
  double b = 0.0;
};

// Steepest coordinate-descent answer for f_i along coordinate j.
struct PlanCoordTerm {
  int src = 0;
  int j = 0;
  int i = 0;
};

struct SlotPlan {
  std::vector<GradTerm> grads;
  std::vector<LinTerm> lins;
  std::vector<PlanCoordTerm> coords;
};

// Parameters of one Eq.-style iteration: every new slot is the sum of its
// scheduled oracle answers.
struct StepPlan {
  std::vector<SlotPlan> slots;
};

bool operator==(const StepPlan& a, const StepPlan& b);
std::string plan_to_string(const StepPlan& plan);

class Schedule {
 public:
  virtual ~Schedule() = default;

  // Parameter generation may depend on the iteration index and internal
  // randomness only, never on oracle answers.
  virtual StepPlan plan(int k, std::mt19937_64& rng) = 0;
  virtual void init_state(std::vector<Vec>& slots, const Vec& w0) const;

  int num_slots() const { return num_slots_; }
  bool stationary() const { return stationary_; }
  bool reads_mu() const { return reads_mu_; }
  const SideInfo& side() const { return side_; }
  const std::string& name() const { return name_; }
  std::string descriptor() const;

 protected:
  Schedule(std::string name, SideInfo side, int num_slots, bool stationary,
           bool reads_mu)
      : name_(std::move(name)),
        side_(side),
        num_slots_(num_slots),
        stationary_(stationary),
        reads_mu_(reads_mu) {}

  std::string name_;
  SideInfo side_;
  int num_slots_ = 1;
  bool stationary_ = false;
  bool reads_mu_ = false;
};

struct Hyper {
  std::optional<double> step;       // override the solver default
  std::optional<int> epoch_length;  // svrg family
};

std::unique_ptr<Schedule> make_schedule(const std::string& name,
                                        const Hyper& hyper,
                                        const SideInfo& side);

const std::vector<std::string>& solver_names();

struct SolverState {
  std::vector<Vec> slots;
  long long k = 0;
  const Vec& solution() const { return slots.front(); }
};

struct TraceRow {
  long long k = 0;
  long long calls = 0;
  double subopt = 0.0;
  double dist = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;
  Vec final_point;
  long long total_calls = 0;

  std::string to_csv() const;  // header: k,calls,subopt,dist
};

// Applies one iteration given an already-generated plan.
void apply_plan(SolverState& state, const StepPlan& plan,
                const FiniteSumProblem& F, CallMeter& meter);

struct RunOptions {
  long long record_every = 1;
  std::optional<double> stop_below_subopt;
  std::vector<StepPlan>* plan_log = nullptr;  // filled when non-null
};

Trace run(const FiniteSumProblem& F, Schedule& schedule, long long budget,
          std::mt19937_64& rng, const RunOptions& opts = {});

using ScheduleFactory = std::function<std::unique_ptr<Schedule>()>;

struct RestartReport {
  Trace trace;
  long long epoch_length = 0;
  std::vector<double> epoch_subopt;  // value at each epoch boundary (incl. start)
};

// Scheme-1 wrapper: epochs of ceil((4C/mu)^(1/alpha)) iterations; each epoch
// restarts the base schedule's parameter stream and warm-starts from the
// previous epoch's output. The rng stream is never reset.
RestartReport run_restarted(const FiniteSumProblem& F,
                            const ScheduleFactory& base, double C, double alpha,
                            double mu, int epochs, const Vec& w0,
                            std::mt19937_64& rng,
                            const RunOptions& opts = {});

}  // namespace fslab
