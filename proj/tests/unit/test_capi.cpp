#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "speclat/speclat.h"

namespace {

const char* kPlan =
    "width = 3\nheight = 3\nrobot = 0,2\nhuman = 2,0\ncapacity = 3\nhorizon = 3\n"
    "sweep = capacity: 3\nchain = velocity: 1..2\nchain = service_time: 1..3\nrho = 0.5\n";

}  // namespace

TEST_CASE("C API round trip") {
  CHECK(std::strlen(speclat_version()) > 0);
  speclat_plan* plan = nullptr;
  REQUIRE(speclat_plan_parse(kPlan, &plan) == SPECLAT_OK);
  CHECK(speclat_plan_num_values(plan) == 1);
  CHECK(speclat_plan_num_points(plan) == 6);
  CHECK(speclat_plan_set_threads(plan, 2) == SPECLAT_OK);

  double p = -1;
  size_t states = 0;
  REQUIRE(speclat_check_point(plan, 0, 2, 3, &p, &states) == SPECLAT_OK);
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
  CHECK(states > 0);

  speclat_sweep* sweep = nullptr;
  REQUIRE(speclat_sweep_run(plan, &sweep) == SPECLAT_OK);
  CHECK(speclat_sweep_checker_calls(sweep) == 6);
  CHECK(speclat_sweep_audit_violations(sweep) == 0);
  double q = -1;
  REQUIRE(speclat_sweep_probability(sweep, 0, 2, 3, &q) == SPECLAT_OK);
  CHECK(q == p);
  CHECK(speclat_sweep_probability(sweep, 0, 3, 1, &q) == SPECLAT_ERR_INVALID_ARGUMENT);

  auto dir = std::filesystem::temp_directory_path() / "speclat_capi_out";
  std::filesystem::remove_all(dir);
  CHECK(speclat_sweep_write(sweep, dir.string().c_str(), 0) == SPECLAT_OK);
  CHECK(std::filesystem::exists(dir / "grid_3.csv"));
  std::filesystem::remove_all(dir);

  size_t comparisons = 0;
  CHECK(speclat_oracle_check(plan, &comparisons, nullptr) == SPECLAT_OK);
  CHECK(comparisons > 0);

  speclat_sweep_free(sweep);
  speclat_plan_free(plan);
}

TEST_CASE("C API errors") {
  speclat_plan* plan = nullptr;
  CHECK(speclat_plan_parse("width = wide\n", &plan) == SPECLAT_ERR_CONFIG);
  CHECK(plan == nullptr);
  CHECK(std::string(speclat_last_error()).find("line 1") != std::string::npos);
  CHECK(std::string(speclat_status_name(SPECLAT_ERR_CONFIG)) == "config error");
  CHECK(speclat_plan_load("/nonexistent.cfg", &plan) == SPECLAT_ERR_IO);
  CHECK(speclat_plan_parse(nullptr, &plan) == SPECLAT_ERR_INVALID_ARGUMENT);

  REQUIRE(speclat_plan_default(&plan) == SPECLAT_OK);
  const double bad[] = {0.5, 2.0};
  CHECK(speclat_plan_set_rho(plan, bad, 2) == SPECLAT_ERR_CONFIG);
  CHECK(speclat_plan_set_threads(plan, 0) == SPECLAT_ERR_INVALID_ARGUMENT);
  CHECK(speclat_plan_set_mode(plan, static_cast<speclat_mode>(7)) == SPECLAT_ERR_INVALID_ARGUMENT);
  double p = 0;
  CHECK(speclat_check_point(plan, 0, 9, 1, &p, nullptr) == SPECLAT_ERR_INVALID_ARGUMENT);
  CHECK(speclat_check_point(plan, 99, 1, 1, &p, nullptr) == SPECLAT_ERR_INVALID_ARGUMENT);
  speclat_plan_free(plan);
  speclat_plan_free(nullptr);
  speclat_sweep_free(nullptr);
}
