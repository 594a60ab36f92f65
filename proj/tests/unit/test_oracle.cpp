#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/generators.hpp"
#include "speclat/checker.hpp"
#include "speclat/error.hpp"
#include "speclat/gridworld.hpp"
#include "speclat/oracle.hpp"

using namespace speclat;

namespace {

Mdp three_state() {
  return build_mdp(VariableSchema({{"s", 0, 2}}), {{0}, {1}, {2}},
                   {{{"a", {{1, 0.5}, {2, 0.5}}}, {"b", {{1, 0.3}, {0, 0.7}}}},
                    {{"idle", {{1, 1.0}}}},
                    {{"idle", {{2, 1.0}}}}},
                   StateFormula::truth());
}

BoundedUntilQuery query(int h) { return {StateFormula::parse("s = 0"), StateFormula::parse("s = 1"), h}; }

}  // namespace

TEST_CASE("brute force on the three-state example") {
  auto m = three_state();
  CHECK(oracle::brute_force_pmax(m, query(2), 0) == doctest::Approx(0.65).epsilon(1e-12));
  for (int h = 0; h <= 8; ++h) CHECK(oracle::brute_force_pmax(m, query(h), 1) == 1.0);
  CHECK(oracle::brute_force_pmax(m, query(5), 2) == 0.0);
}

TEST_CASE("brute force guards") {
  auto m = three_state();
  try {
    oracle::brute_force_pmax(m, query(9), 0);
    FAIL("expected a guard error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OracleGuard);
  }
  CHECK_THROWS_AS(oracle::brute_force_pmax(m, query(8), 0, 10), Error);
}

TEST_CASE("simulation") {
  auto m = three_state();
  auto res = solve_bounded_until(m, query(2));
  SUBCASE("psi start") {
    auto r = oracle::simulate_policy(m, res.policy, query(2), 1, 1000, 1);
    CHECK(r.estimate == 1.0);
    CHECK(r.std_error == 0.0);
  }
  SUBCASE("blocked start") {
    auto r = oracle::simulate_policy(m, res.policy, query(2), 2, 1000, 1);
    CHECK(r.estimate == 0.0);
  }
  SUBCASE("three-state example") {
    auto r = oracle::simulate_policy(m, res.policy, query(2), 0, 100000, 2026);
    CHECK(r.samples == 100000);
    CHECK(r.generator == std::string(oracle::kGeneratorId));
    CHECK(std::abs(r.estimate - 0.65) <= 3 * r.std_error);
  }
  SUBCASE("fixed seed, fixed outcome") {
    auto a = oracle::simulate_policy(m, res.policy, query(2), 0, 5000, 42);
    auto b = oracle::simulate_policy(m, res.policy, query(2), 0, 5000, 42);
    auto c = oracle::simulate_policy(m, res.policy, query(2), 0, 5000, 43);
    CHECK(a.successes == b.successes);
    CHECK(a.seed == 42);
    CHECK(c.seed == 43);
  }
  SUBCASE("policy shorter than the query") {
    CHECK_THROWS_AS(oracle::simulate_policy(m, res.policy, query(3), 0, 10, 1), Error);
  }
}

TEST_CASE("oracle agrees with the checker on a small gridworld at every pending start") {
  grid::GridConfig cfg;
  cfg.width = 3;
  cfg.height = 3;
  cfg.robot0 = {0, 2};
  cfg.human0 = {2, 0};
  cfg.station = {0, 0};
  cfg.capacity = 3;
  cfg.min_energy = 2;
  cfg.horizon = 4;
  cfg.start_anywhere = true;
  grid::SpecParams spec{1, 2};
  Mdp m = grid::build_model(cfg, spec);
  auto pq = grid::property_query(cfg, spec);
  auto v = pmax_bounded_until(m, pq.query);
  std::size_t compared = 0;
  for (StateId s : m.initial_states()) {
    if (!grid::decode_state(m, cfg, s).service) continue;
    ++compared;
    CHECK(std::abs(v[s] - oracle::brute_force_pmax(m, pq.query, s)) <= 1e-9);
  }
  CHECK(compared == 72);
}
