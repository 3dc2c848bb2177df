#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "fslab/fslab_c.h"

int main(int argc, char** argv) {
  CLI::App app{"finite-sum optimization laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  long long seed = -1;
  long long trials = -1;

  const char* kinds[] = {"gap", "bias", "race", "symbolic", "restart", "fit"};
  const char* descriptions[] = {
      "closed-form vs numeric discrepancy table",
      "hidden-index identification error rates",
      "oracle calls to target across condition numbers",
      "exact polynomial degree and envelope audit",
      "restarted epochs with halving check",
      "convergence-rate fits on a trace"};
  for (size_t i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(kinds[i], descriptions[i]);
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--trials", trials, "trial count override");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  int exit_code = 0;
  const fslab_status status = fslab_run_experiment(
      kind.c_str(), config_path.c_str(), out_dir.c_str(), seed, trials,
      &exit_code);
  if (status != FSLAB_OK) {
    std::fprintf(stderr, "fslab: %s\n", fslab_last_error());
    return 1;
  }
  if (exit_code != 0)
    std::fprintf(stderr, "fslab: invariant check failed for kind '%s'\n",
                 kind.c_str());
  return exit_code;
}
