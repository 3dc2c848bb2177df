#include "fslab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fslab/bias_reduction.hpp"
#include "fslab/instances.hpp"
#include "fslab/symbolic_poly.hpp"

namespace fslab {

using nlohmann::json;
namespace fs = std::filesystem;

const char* kFslabVersion = "0.1.0";

namespace {

struct XY {
  std::vector<double> x, y;
};

RateFit least_squares(const XY& xy) {
  const auto n = static_cast<double>(xy.x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xy.x.size(); ++i) {
    sx += xy.x[i];
    sy += xy.y[i];
    sxx += xy.x[i] * xy.x[i];
    sxy += xy.x[i] * xy.y[i];
    syy += xy.y[i] * xy.y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw FslabError("degenerate fit window");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (size_t i = 0; i < xy.x.size(); ++i) {
    const double pred = slope * xy.x[i] + intercept;
    ss_res += (xy.y[i] - pred) * (xy.y[i] - pred);
    ss_tot += (xy.y[i] - ybar) * (xy.y[i] - ybar);
  }
  RateFit fit;
  fit.value = slope;
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.points = static_cast<long long>(xy.x.size());
  return fit;
}

XY window_points(const Trace& trace, const FitWindow& window, bool log_k) {
  const auto n = static_cast<long long>(trace.rows.size());
  const auto lo = static_cast<long long>(std::floor(window.lo * n));
  const auto hi = static_cast<long long>(std::ceil(window.hi * n));
  XY xy;
  for (long long i = lo; i < std::min(hi, n); ++i) {
    const auto& r = trace.rows[i];
    if (r.subopt <= 0.0) continue;
    if (log_k && r.k <= 0) continue;
    xy.x.push_back(log_k ? std::log(static_cast<double>(r.k))
                         : static_cast<double>(r.k));
    xy.y.push_back(std::log(r.subopt));
  }
  if (xy.x.size() < 10)
    throw FslabError(
        "fewer than 10 positive-suboptimality points in the fit window");
  return xy;
}

}  // namespace

RateFit fit_linear_rate(const Trace& trace, const FitWindow& window) {
  RateFit fit = least_squares(window_points(trace, window, false));
  fit.value = std::exp(fit.value);
  if (fit.value > 1.0) fit.value = std::min(fit.value, 1.0);
  return fit;
}

RateFit fit_power_exponent(const Trace& trace, const FitWindow& window) {
  RateFit fit = least_squares(window_points(trace, window, true));
  fit.value = -fit.value;
  return fit;
}

std::optional<double> calls_to_target(const Trace& trace, double eps) {
  for (size_t i = 0; i < trace.rows.size(); ++i) {
    const auto& r = trace.rows[i];
    if (r.subopt <= eps) {
      if (i == 0 || r.subopt <= 0.0 || trace.rows[i - 1].subopt <= 0.0)
        return static_cast<double>(r.calls);
      const auto& p = trace.rows[i - 1];
      const double la = std::log(p.subopt), lb = std::log(r.subopt);
      const double le = std::log(eps);
      const double t = (la - le) / (la - lb);
      return p.calls + t * (r.calls - p.calls);
    }
  }
  return std::nullopt;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FslabError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

namespace {
std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace

Config Config::parse_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FslabError("config line " + std::to_string(lineno) +
                       ": expected key = value");
    cfg.kv_[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get(const std::string& key,
                        const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (...) {
    throw FslabError("config key '" + key + "' is not a number");
  }
}

long long Config::get_int(const std::string& key, long long fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stoll(it->second);
  } catch (...) {
    throw FslabError("config key '" + key + "' is not an integer");
  }
}

std::vector<std::string> Config::get_list(const std::string& key,
                                          const std::string& fallback) const {
  std::vector<std::string> out;
  std::istringstream in(get(key, fallback));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = strip(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::string& fallback) const {
  std::vector<double> out;
  for (const auto& s : get_list(key, fallback)) out.push_back(std::stod(s));
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

namespace {

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FslabError("cannot write " + path.string());
  out << body;
}

void write_manifest(const fs::path& dir, const std::string& kind,
                    const Config& config, const std::vector<std::string>& files) {
  json j;
  j["kind"] = kind;
  j["version"] = kFslabVersion;
  json cfg = json::object();
  for (const auto& [k, v] : config.entries()) cfg[k] = v;
  j["config"] = cfg;
  j["outputs"] = files;
  write_file(dir / "manifest.json", j.dump(2) + "\n");
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// ---- gap -------------------------------------------------------------

int experiment_gap(const Config& config, const fs::path& dir) {
  const auto ns = config.get_double_list("n_list", "3,5,9,15");
  const auto kappas = config.get_double_list("kappa_list", "4,25");
  const auto Ls = config.get_double_list("L_list", "1,2");
  const auto Ms = config.get_double_list("M_list", "1,2");
  const auto lambdas = config.get_double_list("lambda_list", "1,0.5");
  const double tol = config.get_double("tolerance", 1e-6);

  std::string csv = "kind,n,param1,param2,closed,numeric,abs_diff\n";
  double max_diff = 0.0;
  auto record = [&](const BiasPair& pair, double p1, double p2) {
    const double closed = delta_gap_closed(pair);
    const double numeric = delta_gap_numeric(pair);
    const double diff = std::abs(closed - numeric);
    max_diff = std::max(max_diff, diff);
    csv += std::string(pair_kind_name(pair.kind)) + "," +
           std::to_string(pair.n) + "," + fmt(p1) + "," + fmt(p2) + "," +
           fmt(closed) + "," + fmt(numeric) + "," + fmt(diff) + "\n";
  };

  for (double nd : ns) {
    const int n = static_cast<int>(nd);
    for (double kappa : kappas) {
      BiasPairParams p;
      p.kappa = kappa;
      record(make_bias_pair(PairKind::smooth_sc, n, p), kappa, 0.0);
    }
    for (double L : Ls) {
      BiasPairParams p;
      p.L = L;
      record(make_bias_pair(PairKind::smooth_cvx, n, p), L, 0.0);
    }
    for (size_t i = 0; i < Ms.size() && i < lambdas.size(); ++i) {
      BiasPairParams p;
      p.M = Ms[i];
      p.lambda = lambdas[i];
      record(make_bias_pair(PairKind::lipschitz_sc, n, p), Ms[i], lambdas[i]);
    }
  }

  write_file(dir / "gap_table.csv", csv);
  json summary;
  summary["max_abs_diff"] = max_diff;
  summary["tolerance"] = tol;
  summary["pass"] = max_diff < tol;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  write_manifest(dir, "gap", config, {"gap_table.csv", "summary.json"});
  return max_diff < tol ? 0 : 2;
}

// ---- bias ------------------------------------------------------------

int experiment_bias(const Config& config, const fs::path& dir) {
  const auto kind = pair_kind_from_name(config.get("kind", "smooth_sc"));
  const int n = static_cast<int>(config.get_int("n", 15));
  BiasPairParams params;
  params.kappa = config.get_double("kappa", 2.0);
  params.L = config.get_double("L", 1.0);
  params.M = config.get_double("M", 1.0);
  params.lambda = config.get_double("lambda", 1.0);
  const auto pair = make_bias_pair(kind, n, params);

  const auto solvers = config.get_list("solvers", "gd,sgd,sag,svrg,sdca_wd");
  const auto ks = config.get_double_list("k_list", "10");
  const int trials = static_cast<int>(config.get_int("trials", 200));
  const auto seed = static_cast<uint64_t>(config.get_int("seed", 20250823));

  std::string csv = "kind,n,k,solver,trials,err,ci_lo,ci_hi\n";
  for (const auto& solver : solvers) {
    for (double kd : ks) {
      const auto k = static_cast<long long>(kd);
      auto est = error_probability(pair, k, solver, trials, seed);
      csv += std::string(pair_kind_name(kind)) + "," + std::to_string(n) + "," +
             std::to_string(k) + "," + solver + "," + std::to_string(trials) +
             "," + fmt(est.err) + "," + fmt(est.ci_lo) + "," + fmt(est.ci_hi) +
             "\n";
    }
  }
  write_file(dir / "bias_errors.csv", csv);

  json summary;
  summary["delta_n"] = delta_gap_closed(pair);
  summary["n2_over_2"] = 0.5 * n * n;
  summary["info_bound_exact"] = info_lower_bound(n).exact;
  if (config.has("control_budget")) {
    const auto budget = config.get_int("control_budget", 0);
    auto ctrl = error_probability_incremental(
        pair, budget, config.get("control_solver", "svrg"), trials, seed);
    summary["control"] = {{"solver", config.get("control_solver", "svrg")},
                          {"budget", budget},
                          {"err", ctrl.err},
                          {"ci_lo", ctrl.ci_lo},
                          {"ci_hi", ctrl.ci_hi}};
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  write_manifest(dir, "bias", config, {"bias_errors.csv", "summary.json"});
  return 0;
}

// ---- race ------------------------------------------------------------

int experiment_race(const Config& config, const fs::path& dir) {
  const auto kappas = config.get_double_list("kappa_list", "100,1000,10000");
  const auto blind = config.get_list("solvers_blind", "gd,sag,svrg");
  const std::string mu_solver = config.get("solver_mu", "agd");
  const double L = config.get_double("L", 1.0);
  const double target = config.get_double("target", 1e-6);
  const int n = static_cast<int>(config.get_int("n", 4));
  const int d = static_cast<int>(config.get_int("d", 2));
  const int trials = static_cast<int>(config.get_int("trials", 3));
  const auto seed = static_cast<uint64_t>(config.get_int("seed", 20250823));
  const auto budget = config.get_int("budget", 20000000);

  std::string csv = "solver,kappa,trial,calls_to_target\n";
  std::map<std::string, XY> fits;  // log kappa vs log median calls

  for (double kappa : kappas) {
    const double mu = L / kappa;
    // eps R is held at 0.1 so the initial suboptimality scales with kappa
    // while eps < mu stays satisfied.
    const double eps = mu / 2.0;
    const double R = 0.1 / eps;
    const auto F = make_unknown_mu_problem(L, mu, eps, R, d, n);

    std::vector<std::string> all = blind;
    all.push_back(mu_solver);
    for (const auto& solver : all) {
      const bool with_mu = solver == mu_solver;
      SideInfo side = SideInfo::from(F, with_mu);
      std::vector<double> calls;
      for (int t = 0; t < trials; ++t) {
        auto schedule = make_schedule(solver, {}, side);
        auto rng = trial_rng(seed, static_cast<uint64_t>(t));
        RunOptions opts;
        opts.record_every = 16;
        opts.stop_below_subopt = target;
        Trace trace = run(F, *schedule, budget, rng, opts);
        auto c = calls_to_target(trace, target);
        if (!c) throw FslabError(solver + " did not reach the target at kappa " +
                                 fmt(kappa) + " within budget");
        calls.push_back(*c);
        csv += solver + "," + fmt(kappa) + "," + std::to_string(t) + "," +
               fmt(*c) + "\n";
      }
      std::sort(calls.begin(), calls.end());
      const double median = calls[calls.size() / 2];
      fits[solver].x.push_back(std::log(kappa));
      fits[solver].y.push_back(std::log(median));
    }
  }
  write_file(dir / "race_calls.csv", csv);

  json summary;
  bool pass = true;
  for (const auto& [solver, xy] : fits) {
    RateFit fit = least_squares(xy);
    summary["slopes"][solver] = fit.value;
    const bool with_mu = solver == mu_solver;
    const double lo = with_mu ? 0.4 : 0.85;
    const double hi = with_mu ? 0.6 : 1.15;
    const bool ok = fit.value >= lo && fit.value <= hi;
    summary["slope_ok"][solver] = ok;
    pass = pass && ok;
  }
  summary["pass"] = pass;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  write_manifest(dir, "race", config, {"race_calls.csv", "summary.json"});
  return pass ? 0 : 2;
}

// ---- symbolic --------------------------------------------------------

int experiment_symbolic(const Config& config, const fs::path& dir) {
  const auto solvers = config.get_list("solvers", "gd,sgd,sag,svrg");
  const auto k = config.get_int("k", 25);
  const int seeds = static_cast<int>(config.get_int("seeds", 50));
  const auto seed0 = static_cast<uint64_t>(config.get_int("seed", 20250823));

  SymbolicFamily fam;
  fam.L = config.get_double("L", 1.0);
  fam.q_coeff = unknown_mu_q_coeff(config.get_double("eps", 0.1),
                                   config.get_double("R", 1.0));
  fam.d = static_cast<int>(config.get_int("d", 3));
  fam.n = static_cast<int>(config.get_int("n", 3));

  SideInfo side;
  side.L = fam.L;
  side.n = fam.n;
  side.d = fam.d;

  bool pass = true;
  std::string csv = "solver,seed,k,max_degree\n";
  for (const auto& solver : solvers) {
    for (int s = 0; s < seeds; ++s) {
      auto schedule = make_schedule(solver, {}, side);
      PolyVector pv = symbolic_run(fam, *schedule, k, seed0 + s);
      const int deg = pv.max_degree();
      pass = pass && deg <= k;
      csv += solver + "," + std::to_string(s) + "," + std::to_string(k) + "," +
             std::to_string(deg) + "\n";
    }
  }
  write_file(dir / "degree_table.csv", csv);

  // Envelope check on the deterministic gd expectation polynomial.
  auto gd_factory = [&]() { return make_schedule("gd", {}, side); };
  auto expected = expected_first_coord(fam, gd_factory, k, 1, seed0);
  // First iterate coordinate is s(mu) * q_coeff; the envelope lemma is
  // stated for -s(mu).
  const Rational norm = rational_from_double(-1.0 / fam.q_coeff);
  UniPoly lemma_poly = expected.mean.scaled(norm);
  auto env = envelope_margin(lemma_poly, fam.L, k);
  pass = pass && env.found && env.min_ratio >= 1.0 - 1e-12;

  json summary;
  summary["max_k"] = k;
  summary["degree_bound_ok"] = pass;
  summary["envelope"] = {{"found", env.found},
                         {"delta", env.delta},
                         {"min_ratio", env.min_ratio},
                         {"worst_mu", env.worst_mu}};
  summary["pass"] = pass;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  write_manifest(dir, "symbolic", config, {"degree_table.csv", "summary.json"});
  return pass ? 0 : 2;
}

// ---- restart ---------------------------------------------------------

int experiment_restart(const Config& config, const fs::path& dir) {
  const double L = config.get_double("L", 1.0);
  const double kappa = config.get_double("kappa", 100.0);
  const double mu = L / kappa;
  const double eps = config.get_double("eps", mu / 2.0);
  const double R = config.get_double("R", 0.1 / eps);
  const int epochs = static_cast<int>(config.get_int("epochs", 20));
  // Keeps the per-epoch contraction near 0.09 so 20 halving epochs fit
  // inside double precision.
  const double C = config.get_double("C", 0.3 * L);
  const double offset = config.get_double("start_offset", 1e6);
  const auto seed = static_cast<uint64_t>(config.get_int("seed", 20250823));

  const auto F = make_unknown_mu_problem(L, mu, eps, R, 2, 1);
  SideInfo side = SideInfo::from(F, false);
  auto factory = [&]() { return make_schedule("gd", {}, side); };

  Vec w0 = F.minimizer();
  w0(0) += offset / std::sqrt(2.0);
  w0(1) += offset / std::sqrt(2.0);

  auto rng = trial_rng(seed, 0);
  RunOptions opts;
  opts.record_every = 50;
  auto report = run_restarted(F, factory, C, 1.0, mu, epochs, w0, rng, opts);

  std::string csv = "epoch,subopt,ratio\n";
  bool pass = true;
  for (size_t e = 0; e < report.epoch_subopt.size(); ++e) {
    double ratio = 0.0;
    if (e > 0 && report.epoch_subopt[e - 1] > 0.0) {
      ratio = report.epoch_subopt[e] / report.epoch_subopt[e - 1];
      pass = pass && ratio <= 0.5;
    }
    csv += std::to_string(e) + "," + fmt(report.epoch_subopt[e]) + "," +
           fmt(ratio) + "\n";
  }
  write_file(dir / "restart_epochs.csv", csv);
  write_file(dir / "trace_restart.csv", report.trace.to_csv());

  json summary;
  summary["epoch_length"] = report.epoch_length;
  summary["epochs"] = epochs;
  summary["pass"] = pass;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  write_manifest(dir, "restart", config,
                 {"restart_epochs.csv", "trace_restart.csv", "summary.json"});
  return pass ? 0 : 2;
}

// ---- fit -------------------------------------------------------------

int experiment_fit(const Config& config, const fs::path& dir) {
  Trace trace;
  if (config.has("trace")) {
    std::ifstream in(config.get("trace", ""));
    if (!in) throw FslabError("cannot open trace file");
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      TraceRow row;
      if (std::sscanf(line.c_str(), "%lld,%lld,%lf,%lf", &row.k, &row.calls,
                      &row.subopt, &row.dist) == 4)
        trace.rows.push_back(row);
    }
  } else {
    // Demo run: gd on the unknown-mu family.
    const double kappa = config.get_double("kappa", 10.0);
    const auto F = make_unknown_mu_problem(1.0, 1.0 / kappa, 0.5 / kappa,
                                           0.2 * kappa, 2, 1);
    auto schedule = make_schedule("gd", {}, SideInfo::from(F, false));
    auto rng = trial_rng(static_cast<uint64_t>(config.get_int("seed", 1)), 0);
    trace = run(F, *schedule, config.get_int("budget", 100), rng);
    write_file(dir / "trace_fit.csv", trace.to_csv());
  }

  const std::string model = config.get("model", "linear");
  json summary;
  if (model == "linear") {
    RateFit fit = fit_linear_rate(trace);
    summary["model"] = "linear_rate";
    summary["rho"] = fit.value;
    summary["r2"] = fit.r2;
  } else if (model == "power") {
    RateFit fit = fit_power_exponent(trace);
    summary["model"] = "power_exponent";
    summary["alpha"] = fit.value;
    summary["r2"] = fit.r2;
  } else {
    throw FslabError("unknown fit model: " + model);
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  write_manifest(dir, "fit", config, {"summary.json"});
  return 0;
}

}  // namespace

int run_experiment(const std::string& kind, const Config& config,
                   const std::string& out_dir) {
  fs::path dir(out_dir);
  fs::create_directories(dir);
  if (kind == "gap") return experiment_gap(config, dir);
  if (kind == "bias") return experiment_bias(config, dir);
  if (kind == "race") return experiment_race(config, dir);
  if (kind == "symbolic") return experiment_symbolic(config, dir);
  if (kind == "restart") return experiment_restart(config, dir);
  if (kind == "fit") return experiment_fit(config, dir);
  throw FslabError("unknown experiment kind: " + kind);
}

}  // namespace fslab
