#include "fslab/fslab_c.h"

#include <cstring>
#include <string>

#include "fslab/bias_reduction.hpp"
#include "fslab/cli_engine.hpp"
#include "fslab/harness.hpp"
#include "fslab/instances.hpp"

namespace {

thread_local std::string g_last_error;

struct Guard {
  fslab_status code = FSLAB_RUNTIME;
};

template <typename Fn>
fslab_status wrap(Fn&& fn, fslab_status domain_code = FSLAB_RUNTIME) {
  try {
    return fn();
  } catch (const fslab::FslabError& e) {
    g_last_error = e.what();
    return domain_code;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FSLAB_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return FSLAB_RUNTIME;
  }
}

fslab_status invalid(const char* msg) {
  g_last_error = msg;
  return FSLAB_INVALID_ARG;
}

}  // namespace

struct fslab_problem {
  fslab::FiniteSumProblem impl;
};

struct fslab_bias_pair {
  fslab::BiasPair impl;
};

struct fslab_trace {
  fslab::Trace impl;
};

extern "C" {

const char* fslab_version(void) { return fslab::kFslabVersion; }

const char* fslab_last_error(void) { return g_last_error.c_str(); }

fslab_status fslab_unknown_mu_create(double L, double mu, double eps, double R,
                                     int d, int n, fslab_problem** out) {
  if (!out) return invalid("out is null");
  return wrap(
      [&] {
        *out = new fslab_problem{
            fslab::make_unknown_mu_problem(L, mu, eps, R, d, n)};
        return FSLAB_OK;
      },
      FSLAB_INVALID_ARG);
}

void fslab_problem_destroy(fslab_problem* problem) { delete problem; }

fslab_status fslab_problem_dim(const fslab_problem* problem, int* d, int* n) {
  if (!problem) return invalid("problem is null");
  if (d) *d = problem->impl.d();
  if (n) *n = problem->impl.n();
  return FSLAB_OK;
}

fslab_status fslab_problem_eval(const fslab_problem* problem, const double* w,
                                int d, double* value_out, double* grad_out) {
  if (!problem || !w) return invalid("problem or w is null");
  if (d != problem->impl.d()) return invalid("dimension mismatch");
  return wrap([&] {
    fslab::Vec x = Eigen::Map<const fslab::Vec>(w, d);
    if (value_out) *value_out = problem->impl.value(x);
    if (grad_out) {
      fslab::Vec g = problem->impl.gradient(x);
      std::memcpy(grad_out, g.data(), sizeof(double) * d);
    }
    return FSLAB_OK;
  });
}

fslab_status fslab_problem_suboptimality(const fslab_problem* problem,
                                         const double* w, int d, double* out) {
  if (!problem || !w || !out) return invalid("null argument");
  if (d != problem->impl.d()) return invalid("dimension mismatch");
  return wrap([&] {
    fslab::Vec x = Eigen::Map<const fslab::Vec>(w, d);
    *out = problem->impl.suboptimality(x);
    return FSLAB_OK;
  });
}

fslab_status fslab_bias_pair_create(const char* kind, int n, double p1,
                                    double p2, int d, fslab_bias_pair** out) {
  if (!kind || !out) return invalid("kind or out is null");
  return wrap(
      [&] {
        const auto k = fslab::pair_kind_from_name(kind);
        fslab::BiasPairParams params;
        switch (k) {
          case fslab::PairKind::smooth_sc:
            params.kappa = p1;
            break;
          case fslab::PairKind::smooth_cvx:
            params.L = p1;
            break;
          case fslab::PairKind::lipschitz_sc:
            params.M = p1;
            params.lambda = p2;
            break;
        }
        *out = new fslab_bias_pair{fslab::make_bias_pair(k, n, params, d)};
        return FSLAB_OK;
      },
      FSLAB_INVALID_ARG);
}

void fslab_bias_pair_destroy(fslab_bias_pair* pair) { delete pair; }

fslab_status fslab_bias_pair_delta_closed(const fslab_bias_pair* pair,
                                          double* out) {
  if (!pair || !out) return invalid("null argument");
  return wrap([&] {
    *out = fslab::delta_gap_closed(pair->impl);
    return FSLAB_OK;
  });
}

fslab_status fslab_bias_pair_delta_numeric(const fslab_bias_pair* pair,
                                           double* out) {
  if (!pair || !out) return invalid("null argument");
  return wrap([&] {
    *out = fslab::delta_gap_numeric(pair->impl);
    return FSLAB_OK;
  });
}

fslab_status fslab_solve(const fslab_problem* problem, const char* solver,
                         int64_t budget, uint64_t seed, int64_t record_every,
                         fslab_trace** out) {
  if (!problem || !solver || !out) return invalid("null argument");
  if (budget < 0) return invalid("budget must be nonnegative");
  if (record_every < 1) return invalid("record_every must be >= 1");
  return wrap([&] {
    const bool with_mu = problem->impl.meta().mu.has_value();
    auto schedule = fslab::make_schedule(
        solver, {}, fslab::SideInfo::from(problem->impl, with_mu));
    auto rng = fslab::trial_rng(seed, 0);
    fslab::RunOptions opts;
    opts.record_every = record_every;
    fslab::Trace trace = fslab::run(problem->impl, *schedule, budget, rng, opts);
    *out = new fslab_trace{std::move(trace)};
    return FSLAB_OK;
  });
}

void fslab_trace_destroy(fslab_trace* trace) { delete trace; }

int64_t fslab_trace_rows(const fslab_trace* trace) {
  return trace ? static_cast<int64_t>(trace->impl.rows.size()) : 0;
}

fslab_status fslab_trace_get_row(const fslab_trace* trace, int64_t index,
                                 fslab_trace_row* out) {
  if (!trace || !out) return invalid("null argument");
  if (index < 0 || index >= fslab_trace_rows(trace))
    return invalid("row index out of range");
  const auto& r = trace->impl.rows[static_cast<size_t>(index)];
  out->k = r.k;
  out->calls = r.calls;
  out->subopt = r.subopt;
  out->dist = r.dist;
  return FSLAB_OK;
}

fslab_status fslab_info_lower_bound(int64_t n, double* exact_out,
                                    double* bound_out) {
  if (!exact_out || !bound_out) return invalid("null argument");
  return wrap(
      [&] {
        auto b = fslab::info_lower_bound(n);
        *exact_out = b.exact;
        *bound_out = b.bound;
        return FSLAB_OK;
      },
      FSLAB_INVALID_ARG);
}

fslab_status fslab_entropy_margin(double p, double* out) {
  if (!out) return invalid("out is null");
  return wrap(
      [&] {
        *out = fslab::entropy_bound_margin(p);
        return FSLAB_OK;
      },
      FSLAB_INVALID_ARG);
}

fslab_status fslab_run_experiment(const char* kind, const char* config_path,
                                  const char* out_dir, int64_t seed_override,
                                  int64_t trials_override, int* exit_code_out) {
  if (!kind || !out_dir || !exit_code_out) return invalid("null argument");
  return wrap([&]() -> fslab_status {
    fslab::Config config;
    if (config_path && config_path[0] != '\0') {
      try {
        config = fslab::Config::parse_file(config_path);
      } catch (const fslab::FslabError& e) {
        g_last_error = e.what();
        return FSLAB_IO;
      }
    }
    if (seed_override >= 0)
      config.set("seed", std::to_string(seed_override));
    if (trials_override >= 0)
      config.set("trials", std::to_string(trials_override));
    try {
      *exit_code_out = fslab::run_experiment(kind, config, out_dir);
    } catch (const fslab::FslabError& e) {
      g_last_error = e.what();
      return FSLAB_INVALID_ARG;
    }
    return FSLAB_OK;
  });
}

}  // extern "C"
