#include <cmath>

#include "fslab/cli_engine.hpp"

namespace fslab {
namespace {

int sample_index(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, n - 1);
  return u(rng);
}

// Incremental gradient descent, step 1/L, i = k mod n. On problems with
// identical individuals this is exact GD.
class GdSchedule final : public Schedule {
 public:
  GdSchedule(const SideInfo& side, double step)
      : Schedule("gd", side, 1, true, false), step_(step) {}

  StepPlan plan(int k, std::mt19937_64&) override {
    StepPlan p;
    p.slots.resize(1);
    p.slots[0].grads.push_back({0, -step_, 1.0, k % side_.n});
    return p;
  }

 private:
  double step_;
};

// Nesterov momentum; slots: 0 = w, 1 = y.
class AgdSchedule final : public Schedule {
 public:
  AgdSchedule(const SideInfo& side, double step, bool strongly_convex)
      : Schedule("agd", side, 2, false, strongly_convex),
        step_(step),
        strongly_convex_(strongly_convex) {
    if (strongly_convex_) {
      const double rk = std::sqrt(side.L / *side.mu);
      beta_const_ = (rk - 1.0) / (rk + 1.0);
    }
  }

  StepPlan plan(int k, std::mt19937_64&) override {
    const double beta = strongly_convex_ ? beta_const_ : convex_beta(k);
    const int i = k % side_.n;
    StepPlan p;
    p.slots.resize(2);
    // w_next = y - step * grad f_i(y)
    p.slots[0].grads.push_back({1, -step_, 1.0, i});
    // y_next = (1 + beta) w_next - beta w
    p.slots[1].grads.push_back({1, -(1.0 + beta) * step_, 1.0 + beta, i});
    p.slots[1].lins.push_back({0, -beta});
    return p;
  }

 private:
  double convex_beta(int k) {
    // t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2, beta_k = (t_k - 1) / t_{k+1}.
    while (static_cast<int>(t_seq_.size()) <= k + 1) {
      const double t = t_seq_.back();
      t_seq_.push_back(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)));
    }
    return (t_seq_[k] - 1.0) / t_seq_[k + 1];
  }

  std::vector<double> t_seq_{1.0};

  double step_;
  bool strongly_convex_;
  double beta_const_ = 0.0;
};

class SgdSchedule final : public Schedule {
 public:
  SgdSchedule(const SideInfo& side, std::optional<double> const_step)
      : Schedule(const_step ? "sgd_const" : "sgd", side, 1,
                 const_step.has_value(), side.mu.has_value() && !const_step),
        const_step_(const_step) {}

  StepPlan plan(int k, std::mt19937_64& rng) override {
    double eta;
    if (const_step_) {
      eta = *const_step_;
    } else if (side_.mu) {
      eta = std::min(1.0 / side_.L, 2.0 / (*side_.mu * (k + 1)));
    } else {
      eta = 1.0 / (side_.L * std::sqrt(static_cast<double>(k + 1)));
    }
    StepPlan p;
    p.slots.resize(1);
    p.slots[0].grads.push_back({0, -eta, 1.0, sample_index(side_.n, rng)});
    return p;
  }

 private:
  std::optional<double> const_step_;
};

// Gradient memory lives in extra slots: slot 1+i holds the last gradient
// of individual i (initialized to zero).
class SagSchedule final : public Schedule {
 public:
  SagSchedule(const std::string& name, const SideInfo& side, double step,
              bool saga)
      : Schedule(name, side, 1 + side.n, true, false), step_(step), saga_(saga) {}

  StepPlan plan(int, std::mt19937_64& rng) override {
    const int n = side_.n;
    const int i = sample_index(n, rng);
    StepPlan p;
    p.slots.resize(1 + n);
    auto& w = p.slots[0];
    if (saga_) {
      // w - eta [grad f_i(w) - y_i + (1/n) sum_j y_j]
      w.grads.push_back({0, -step_, 1.0, i});
      for (int j = 0; j < n; ++j) {
        double b = -step_ / n;
        if (j == i) b += step_;
        w.lins.push_back({1 + j, b});
      }
    } else {
      // w - (eta/n) [grad f_i(w) + sum_{j != i} y_j]
      w.grads.push_back({0, -step_ / n, 1.0, i});
      for (int j = 0; j < n; ++j)
        if (j != i) w.lins.push_back({1 + j, -step_ / n});
    }
    for (int j = 0; j < n; ++j) {
      if (j == i)
        p.slots[1 + j].grads.push_back({0, 1.0, 0.0, i});
      else
        p.slots[1 + j].lins.push_back({1 + j, 1.0});
    }
    return p;
  }

  void init_state(std::vector<Vec>& slots, const Vec& w0) const override {
    slots.assign(num_slots_, Vec::Zero(w0.size()));
    slots[0] = w0;
  }

 private:
  double step_;
  bool saga_;
};

// Slots: 0 = w, 1 = snapshot, 2 = full-gradient accumulator. Each epoch is a
// snapshot pass of n iterations followed by m inner iterations.
class SvrgSchedule final : public Schedule {
 public:
  SvrgSchedule(const std::string& name, const SideInfo& side, double step,
               int epoch_length, bool doubling)
      : Schedule(name, side, 3, true, false),
        step_(step),
        m0_(epoch_length),
        doubling_(doubling) {}

  StepPlan plan(int k, std::mt19937_64& rng) override {
    const int n = side_.n;
    long long offset = k;
    long long m = m0_;
    while (offset >= n + m) {
      offset -= n + m;
      if (doubling_) m *= 2;
    }
    StepPlan p;
    p.slots.resize(3);
    if (offset < n) {
      const int i = static_cast<int>(offset);
      p.slots[0].lins.push_back({0, 1.0});
      if (i == 0) {
        p.slots[1].lins.push_back({0, 1.0});
        p.slots[2].grads.push_back({0, 1.0 / n, 0.0, 0});
      } else {
        p.slots[1].lins.push_back({1, 1.0});
        p.slots[2].lins.push_back({2, 1.0});
        p.slots[2].grads.push_back({1, 1.0 / n, 0.0, i});
      }
    } else {
      const int i = sample_index(n, rng);
      p.slots[0].grads.push_back({0, -step_, 1.0, i});
      p.slots[0].grads.push_back({1, step_, 0.0, i});
      p.slots[0].lins.push_back({2, -step_});
      p.slots[1].lins.push_back({1, 1.0});
      p.slots[2].lins.push_back({2, 1.0});
    }
    return p;
  }

  void init_state(std::vector<Vec>& slots, const Vec& w0) const override {
    slots.assign(3, Vec::Zero(w0.size()));
    slots[0] = w0;
    slots[1] = w0;
  }

 private:
  double step_;
  int m0_;
  bool doubling_;
};

// SDCA without duality, realized as randomized exact coordinate descent
// through the steepest coordinate-descent oracle.
class SdcaSchedule final : public Schedule {
 public:
  explicit SdcaSchedule(const SideInfo& side)
      : Schedule("sdca_wd", side, 1, true, false) {}

  StepPlan plan(int, std::mt19937_64& rng) override {
    StepPlan p;
    p.slots.resize(1);
    const int i = sample_index(side_.n, rng);
    std::uniform_int_distribution<int> uj(0, side_.d - 1);
    p.slots[0].coords.push_back({0, uj(rng), i});
    return p;
  }
};

}  // namespace

const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names = {
      "gd", "agd", "sgd", "sag", "saga", "svrg", "svrg_pp", "sdca_wd"};
  return names;
}

std::unique_ptr<Schedule> make_schedule(const std::string& name,
                                        const Hyper& hyper,
                                        const SideInfo& side) {
  if (side.L <= 0.0 || side.n < 1 || side.d < 1)
    throw FslabError("side information must contain L, n, d");
  const double L = side.L;
  if (name == "gd")
    return std::make_unique<GdSchedule>(side, hyper.step.value_or(1.0 / L));
  if (name == "agd") {
    const bool sc = side.mu.has_value();
    return std::make_unique<AgdSchedule>(side, hyper.step.value_or(1.0 / L), sc);
  }
  if (name == "agd_sc") {
    if (!side.mu)
      throw FslabError("agd (strongly convex) requested without mu");
    return std::make_unique<AgdSchedule>(side, hyper.step.value_or(1.0 / L), true);
  }
  if (name == "sgd")
    return std::make_unique<SgdSchedule>(side, std::nullopt);
  if (name == "sgd_const")
    return std::make_unique<SgdSchedule>(side, hyper.step.value_or(1.0 / L));
  if (name == "sag")
    return std::make_unique<SagSchedule>("sag", side,
                                         hyper.step.value_or(1.0 / (3.0 * L)),
                                         false);
  if (name == "saga")
    return std::make_unique<SagSchedule>("saga", side,
                                         hyper.step.value_or(1.0 / (3.0 * L)),
                                         true);
  if (name == "svrg")
    return std::make_unique<SvrgSchedule>(
        "svrg", side, hyper.step.value_or(1.0 / (10.0 * L)),
        hyper.epoch_length.value_or(2 * side.n), false);
  if (name == "svrg_pp")
    return std::make_unique<SvrgSchedule>(
        "svrg_pp", side, hyper.step.value_or(1.0 / (10.0 * L)),
        hyper.epoch_length.value_or(2 * side.n), true);
  if (name == "sdca_wd") return std::make_unique<SdcaSchedule>(side);
  throw FslabError("unknown solver name: " + name);
}

}  // namespace fslab
