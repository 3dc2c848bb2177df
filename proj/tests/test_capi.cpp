#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "fslab/fslab_c.h"

namespace fs = std::filesystem;

TEST_CASE("version string is exposed") {
  REQUIRE(fslab_version() != nullptr);
  CHECK(std::strlen(fslab_version()) > 0);
}

TEST_CASE("problem lifecycle, evaluation, and solving") {
  fslab_problem* problem = nullptr;
  REQUIRE(fslab_unknown_mu_create(1.0, 0.5, 0.1, 1.0, 2, 3, &problem) ==
          FSLAB_OK);
  REQUIRE(problem != nullptr);

  int d = 0, n = 0;
  CHECK(fslab_problem_dim(problem, &d, &n) == FSLAB_OK);
  CHECK(d == 2);
  CHECK(n == 3);

  const double w0[2] = {0.0, 0.0};
  double value = 0.0, grad[2] = {0.0, 0.0};
  CHECK(fslab_problem_eval(problem, w0, 2, &value, grad) == FSLAB_OK);
  CHECK(value == doctest::Approx(0.0));
  CHECK(grad[0] == doctest::Approx(-0.1 / std::sqrt(2.0)));

  double subopt0 = 0.0;
  CHECK(fslab_problem_suboptimality(problem, w0, 2, &subopt0) == FSLAB_OK);
  CHECK(subopt0 > 0.0);

  fslab_trace* trace = nullptr;
  REQUIRE(fslab_solve(problem, "gd", 200, 7, 1, &trace) == FSLAB_OK);
  const int64_t rows = fslab_trace_rows(trace);
  REQUIRE(rows > 2);

  fslab_trace_row first{}, last{};
  CHECK(fslab_trace_get_row(trace, 0, &first) == FSLAB_OK);
  CHECK(fslab_trace_get_row(trace, rows - 1, &last) == FSLAB_OK);
  CHECK(first.k == 0);
  CHECK(first.subopt == doctest::Approx(subopt0));
  CHECK(last.subopt < 1e-6 * first.subopt);
  CHECK(fslab_trace_get_row(trace, rows, &last) == FSLAB_INVALID_ARG);

  fslab_trace_destroy(trace);
  fslab_problem_destroy(problem);
}

TEST_CASE("invalid construction reports through last_error") {
  fslab_problem* problem = nullptr;
  CHECK(fslab_unknown_mu_create(1.0, 2.0, 0.1, 1.0, 2, 3, &problem) ==
        FSLAB_INVALID_ARG);
  CHECK(problem == nullptr);
  CHECK(std::strlen(fslab_last_error()) > 0);

  fslab_bias_pair* pair = nullptr;
  CHECK(fslab_bias_pair_create("bogus", 3, 1.0, 0.0, 2, &pair) ==
        FSLAB_INVALID_ARG);
  CHECK(fslab_bias_pair_create("smooth_sc", 4, 9.0, 0.0, 2, &pair) ==
        FSLAB_INVALID_ARG);
}

TEST_CASE("bias pair gaps agree across the two computations") {
  fslab_bias_pair* pair = nullptr;
  REQUIRE(fslab_bias_pair_create("smooth_sc", 3, 9.0, 0.0, 2, &pair) ==
          FSLAB_OK);
  double closed = 0.0, numeric = 0.0;
  CHECK(fslab_bias_pair_delta_closed(pair, &closed) == FSLAB_OK);
  CHECK(fslab_bias_pair_delta_numeric(pair, &numeric) == FSLAB_OK);
  CHECK(closed == doctest::Approx(10.0 / 9.0));
  CHECK(numeric == doctest::Approx(closed).epsilon(1e-9));
  fslab_bias_pair_destroy(pair);
}

TEST_CASE("scalar bounds") {
  double exact = 0.0, bound = 0.0;
  REQUIRE(fslab_info_lower_bound(15, &exact, &bound) == FSLAB_OK);
  CHECK(bound == doctest::Approx(112.5));
  CHECK(exact >= bound);
  CHECK(fslab_info_lower_bound(0, &exact, &bound) == FSLAB_INVALID_ARG);

  double margin = -1.0;
  REQUIRE(fslab_entropy_margin(0.25, &margin) == FSLAB_OK);
  CHECK(margin == doctest::Approx(0.8112781244591328 - 0.75));
  CHECK(fslab_entropy_margin(1.5, &margin) == FSLAB_INVALID_ARG);
}

TEST_CASE("experiments run through the C surface") {
  const fs::path dir = fs::temp_directory_path() / "fslab_capi_test";
  fs::remove_all(dir);

  int exit_code = -1;
  REQUIRE(fslab_run_experiment("fit", "", dir.string().c_str(), 3, -1,
                               &exit_code) == FSLAB_OK);
  CHECK(exit_code == 0);
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "manifest.json"));

  CHECK(fslab_run_experiment("bogus", "", dir.string().c_str(), -1, -1,
                             &exit_code) == FSLAB_INVALID_ARG);
  CHECK(fslab_run_experiment("fit", "/no/such/config", dir.string().c_str(), -1,
                             -1, &exit_code) == FSLAB_IO);
  fs::remove_all(dir);
}
