#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fslab/cli_engine.hpp"
#include "fslab/common.hpp"

namespace fslab {

struct RateFit {
  double value = 0.0;  // linear rate rho, or power exponent alpha
  double r2 = 0.0;
  long long points = 0;
};

// Fraction of the trace used for fitting; defaults to the middle 60%.
struct FitWindow {
  double lo = 0.2;
  double hi = 0.8;
};

// Least squares on log(subopt) vs k; rho = exp(slope).
RateFit fit_linear_rate(const Trace& trace, const FitWindow& window = {});

// Least squares on log(subopt) vs log(k); alpha = -slope.
RateFit fit_power_exponent(const Trace& trace, const FitWindow& window = {});

// First call count at which suboptimality crosses eps, interpolating
// linearly in (calls, log subopt) between trace rows. Returns nullopt when
// the trace never reaches eps.
std::optional<double> calls_to_target(const Trace& trace, double eps);

// Flat key=value configuration; '#' starts a comment.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::string& fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::string& fallback) const;
  void set(const std::string& key, const std::string& value);
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Runs one experiment kind into out_dir, writing trace_*.csv, summary.json
// and manifest.json. Returns 0 on success, 2 when the kind's invariant
// checks fail, 1 on bad configuration.
int run_experiment(const std::string& kind, const Config& config,
                   const std::string& out_dir);

extern const char* kFslabVersion;

}  // namespace fslab
