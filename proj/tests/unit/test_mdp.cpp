#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "../support/generators.hpp"
#include "speclat/error.hpp"
#include "speclat/formula.hpp"
#include "speclat/mdp.hpp"

using namespace speclat;

namespace {

VariableSchema chain_schema() { return VariableSchema({{"s", 0, 2}}); }

// s0 -> s1 -> s2, s2 absorbing.
Mdp three_state_chain() {
  return build_mdp(chain_schema(), {{0}, {1}, {2}},
                   {{{"go", {{1, 1.0}}}}, {{"go", {{2, 1.0}}}}, {{"stop", {{2, 1.0}}}}},
                   StateFormula::parse("s = 0"));
}

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("formula parsing") {
  auto f = StateFormula::parse("(robotX ≠ humanX) ∨ (robotY ≠ humanY)");
  CHECK(f.kind() == StateFormula::Kind::Or);
  CHECK(f.variables() == std::vector<std::string>{"humanX", "humanY", "robotX", "robotY"});

  auto g = StateFormula::parse("energy = 25 ∧ tick = 0");
  CHECK(g.to_string() == "energy = 25 & tick = 0");
  CHECK(StateFormula::parse("a >= 1 && !(b == 2 || c < 3)").to_string() == "a >= 1 & !(b = 2 | c < 3)");
  CHECK(StateFormula::parse("serviceHuman").to_string() == "serviceHuman != 0");
  CHECK(StateFormula::parse("true").kind() == StateFormula::Kind::True);

  CHECK_THROWS_AS(StateFormula::parse("a = "), Error);
  CHECK_THROWS_AS(StateFormula::parse("(a = 1"), Error);
  CHECK_THROWS_AS(StateFormula::parse("a = 1 b"), Error);
}

TEST_CASE("formula round trip through to_string") {
  for (const char* text : {"a = 1 & b != 2 | c <= 3", "!(a > 1) & (b >= 0 | c < 4)", "false | true",
                           "a = b & !c", "a < -2"}) {
    auto f = StateFormula::parse(text);
    CHECK(StateFormula::parse(f.to_string()).to_string() == f.to_string());
  }
}

TEST_CASE("schema encode and decode") {
  VariableSchema schema({{"x", -2, 3}, {"y", 0, 4}, {"z", 1, 1}});
  CHECK(schema.cardinality() == 30);
  std::set<StateKey> keys;
  std::vector<int> out(3);
  for (int x = -2; x <= 3; ++x) {
    for (int y = 0; y <= 4; ++y) {
      std::vector<int> v{x, y, 1};
      auto k = schema.encode(v);
      CHECK(k < schema.cardinality());
      keys.insert(k);
      schema.decode(k, out);
      CHECK(out == v);
      CHECK(schema.component(k, 0) == x);
    }
  }
  CHECK(keys.size() == 30);
  std::vector<int> bad{4, 0, 1};
  CHECK_THROWS_AS(schema.encode(bad), Error);
  CHECK(error_text([&] { schema.encode(bad); }).find("out-of-range valuation") != std::string::npos);
  CHECK_THROWS_AS(VariableSchema({{"x", 0, 1}, {"x", 0, 1}}), Error);
  CHECK_THROWS_AS(VariableSchema({{"x", 2, 1}}), Error);
}

TEST_CASE("key order is row-major over the schema") {
  VariableSchema schema({{"a", 0, 3}, {"b", 0, 9}});
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> da(0, 3), db(0, 9);
  for (int i = 0; i < 200; ++i) {
    std::vector<int> u{da(rng), db(rng)}, v{da(rng), db(rng)};
    CHECK((schema.encode(u) < schema.encode(v)) == (u < v));
  }
}

TEST_CASE("build validates distributions") {
  SUBCASE("single self-loop") {
    auto m = build_mdp(chain_schema(), {{0}}, {{{"loop", {{0, 1.0}}}}}, StateFormula::truth());
    CHECK(m.num_states() == 1);
    CHECK(m.num_actions(0) == 1);
    CHECK(m.initial_states() == std::vector<StateId>{0});
    CHECK(m.diagnostics().empty());
  }
  SUBCASE("sum below one") {
    auto msg = error_text([] {
      build_mdp(chain_schema(), {{0}, {1}, {2}}, {{{"a", {{1, 0.5}, {2, 0.4}}}}}, StateFormula::truth());
    });
    CHECK(msg.find("probabilities sum to 0.9") != std::string::npos);
  }
  SUBCASE("non-positive and repeated targets") {
    CHECK_THROWS_AS(build_mdp(chain_schema(), {{0}, {1}}, {{{"a", {{1, 1.5}, {0, -0.5}}}}}, StateFormula::truth()),
                    Error);
    CHECK_THROWS_AS(build_mdp(chain_schema(), {{0}, {1}}, {{{"a", {{1, 0.5}, {1, 0.5}}}}}, StateFormula::truth()),
                    Error);
    CHECK_THROWS_AS(build_mdp(chain_schema(), {{0}}, {{{"a", {{3, 1.0}}}}}, StateFormula::truth()), Error);
  }
  SUBCASE("duplicate valuation") {
    CHECK_THROWS_AS(build_mdp(chain_schema(), {{0}, {0}}, {}, StateFormula::truth()), Error);
  }
  SUBCASE("no initial state") {
    CHECK_THROWS_AS(build_mdp(chain_schema(), {{0}}, {{{"a", {{0, 1.0}}}}}, StateFormula::falsity()), Error);
  }
  SUBCASE("deadlock becomes a stall loop") {
    auto m = build_mdp(chain_schema(), {{0}, {1}}, {{{"a", {{1, 1.0}}}}}, StateFormula::truth());
    REQUIRE(m.diagnostics().size() == 1);
    CHECK(m.diagnostics()[0].state == 1);
    REQUIRE(m.num_actions(1) == 1);
    auto t = m.transitions(m.first_action(1));
    REQUIRE(t.size() == 1);
    CHECK(t[0].target == 1);
    CHECK(t[0].prob == 1.0);
    m.validate();
  }
}

TEST_CASE("three-state chain") {
  auto m = three_state_chain();
  m.validate();
  CHECK(m.num_states() == 3);
  CHECK(m.initial_states() == std::vector<StateId>{0});
  auto s0 = *m.find(std::vector<int>{0});
  auto s2 = *m.find(std::vector<int>{2});
  std::vector<StateId> from0{s0}, from2{s2};
  CHECK(reachable(m, from0).size() == 3);
  CHECK(reachable(m, from2) == std::vector<StateId>{s2});
  CHECK(m.action_label(m.first_action(s2)) == "stop");
  std::ostringstream dump;
  m.write_dump(dump);
  CHECK(dump.str().find("stop") != std::string::npos);
}

TEST_CASE("states are numbered in key order whatever the insertion order") {
  MdpBuilder b(chain_schema());
  auto a = b.add_state(std::vector<int>{2});
  auto c = b.add_state(std::vector<int>{0});
  auto d = b.add_state(std::vector<int>{1});
  b.add_action(a, "x", std::vector<Transition>{{c, 1.0}});
  b.add_action(c, "x", std::vector<Transition>{{d, 1.0}});
  b.add_action(d, "x", std::vector<Transition>{{a, 1.0}});
  b.mark_initial(a);
  auto m = std::move(b).build();
  for (StateId s = 0; s < 3; ++s) CHECK(m.value(s, 0) == static_cast<int>(s));
  CHECK(m.initial_states() == std::vector<StateId>{2});
  // 0 -> 1 -> 2 -> 0 after renumbering
  CHECK(m.transitions(m.first_action(0))[0].target == 1);
  CHECK(m.transitions(m.first_action(2))[0].target == 0);
}

TEST_CASE("state limit") {
  MdpBuilder b(VariableSchema({{"x", 0, 9}}));
  b.set_state_limit(3);
  for (int i = 0; i < 3; ++i) b.add_state(std::vector<int>{i});
  try {
    b.add_state(std::vector<int>{3});
    FAIL("expected a state-limit error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StateLimit);
  }
}

TEST_CASE("eval_formula") {
  VariableSchema schema({{"robotX", 0, 6}, {"robotY", 0, 6}, {"humanX", 0, 6}, {"humanY", 0, 6}, {"energy", 0, 25},
                         {"tick", 0, 20}});
  auto m = build_mdp(schema, {{4, 4, 5, 5, 24, 0}, {4, 4, 4, 4, 25, 0}}, {}, StateFormula::truth());
  auto s = *m.find(std::vector<int>{4, 4, 5, 5, 24, 0});
  auto same = *m.find(std::vector<int>{4, 4, 4, 4, 25, 0});
  for (StateId x = 0; x < m.num_states(); ++x) CHECK(eval_formula(m, x, StateFormula::truth()));
  auto apart = StateFormula::parse("(robotX ≠ humanX) ∨ (robotY ≠ humanY)");
  CHECK(eval_formula(m, s, apart));
  CHECK_FALSE(eval_formula(m, same, apart));
  CHECK_FALSE(eval_formula(m, s, StateFormula::parse("energy = 25 ∧ tick = 0")));
  CHECK(eval_formula(m, same, StateFormula::parse("energy = 25 ∧ tick = 0")));
  CHECK_THROWS_AS(eval_formula(m, s, StateFormula::parse("nope = 1")), Error);
  auto labels = label_states(m, apart);
  CHECK(labels[s] == 1);
  CHECK(labels[same] == 0);
}

TEST_CASE("reachable is a closure: contains its seeds, closed, idempotent, monotone") {
  std::mt19937_64 rng(20261015);
  for (int trial = 0; trial < 100; ++trial) {
    auto r = testgen::random_mdp(rng);
    const auto& m = r.mdp;
    std::vector<StateId> seeds;
    std::uniform_int_distribution<StateId> pick(0, static_cast<StateId>(m.num_states() - 1));
    seeds.push_back(pick(rng));
    auto closure = reachable(m, seeds);
    std::set<StateId> set(closure.begin(), closure.end());
    CHECK(set.count(seeds[0]) == 1);
    for (StateId s : closure) {
      for (std::size_t a = m.first_action(s); a < m.first_action(s) + m.num_actions(s); ++a) {
        for (const auto& t : m.transitions(a)) CHECK(set.count(t.target) == 1);
      }
    }
    CHECK(reachable(m, closure) == closure);
    seeds.push_back(pick(rng));
    auto bigger = reachable(m, seeds);
    CHECK(std::includes(bigger.begin(), bigger.end(), closure.begin(), closure.end()));
  }
}

TEST_CASE("random models satisfy the stochasticity invariant") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    auto r = testgen::random_mdp(rng);
    r.mdp.validate();
    for (std::size_t a = 0; a < r.mdp.num_actions(); ++a) {
      double sum = 0;
      for (const auto& t : r.mdp.transitions(a)) sum += t.prob;
      CHECK(std::abs(sum - 1.0) <= kProbabilityTolerance);
    }
  }
}
