#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mss_util.hpp"
#include "pamdp/explicit_solver.hpp"
#include "pamdp/strips.hpp"

using namespace pamdp;
using namespace pamdp::testutil;

namespace {
using Lat = SupersetLattice;
}

TEST_CASE("enumerate_states") {
  MssMdp mdp(parse_mss(
      "conditions: a b c\ninit:\ngoal: c\n"
      "operator o\n  guard:\n  cost: 1\n  effect: 1/2 => add(c)\n  effect: 1/2 =>\n"));
  auto e = enumerate_states(mdp, 100);
  CHECK(e.states.size() == 8);
  CHECK_THROWS_AS(enumerate_states(mdp, 5), std::runtime_error);
  for (std::size_t i = 0; i < e.states.size(); ++i) {
    REQUIRE(e.enabled[i].size() == 1);
    Rational sum = 0;
    for (const auto& [j, p] : e.trans[i][0]) sum += p;
    CHECK(sum == 1);
  }
  int goals = 0;
  for (bool g : e.goal) goals += g;
  CHECK(goals == 4);
}

TEST_CASE("ssp oracle hand examples") {
  SUBCASE("geometric trial has value 2") {
    MssMdp mdp(parse_mss(
        "conditions: g\ninit:\ngoal: g\n"
        "operator try\n  guard:\n  cost: 1\n  effect: 1/2 => add(g)\n  effect: 1/2 =>\n"));
    auto e = enumerate_states(mdp, 10);
    auto sol = explicit_ssp_oracle(e);
    for (std::size_t i = 0; i < e.states.size(); ++i) {
      CHECK(sol.defined[i]);
      CHECK(sol.value[i] == (e.goal[i] ? 0 : 2));
    }
  }

  SUBCASE("deterministic two-step chain sums its costs") {
    MssMdp mdp(parse_mss(
        "conditions: a b\ninit:\ngoal: a b\n"
        "operator first\n  guard:\n  cost: 3\n  effect: 1 => add(a)\n"
        "operator second\n  guard: a\n  cost: 4\n  effect: 1 => add(b)\n"));
    auto e = enumerate_states(mdp, 10);
    auto sol = explicit_ssp_oracle(e);
    CHECK(sol.value[e.index.at(0b00)] == 7);
    CHECK(sol.value[e.index.at(0b01)] == 4);
    CHECK(sol.value[e.index.at(0b11)] == 0);
  }

  SUBCASE("dominated action is not chosen") {
    MssMdp mdp(parse_mss(
        "conditions: g\ninit:\ngoal: g\n"
        "operator cheap\n  guard:\n  cost: 1\n  effect: 1 => add(g)\n"
        "operator pricey\n  guard:\n  cost: 5\n  effect: 1 => add(g)\n"));
    auto e = enumerate_states(mdp, 10);
    auto sol = explicit_ssp_oracle(e);
    CHECK(sol.value[e.index.at(0)] == 1);
    CHECK(sol.action_of[e.index.at(0)] == 0);
  }
}

TEST_CASE("proper mask excludes trapped states") {
  // without b, the only move loops in place; goal needs b which nothing adds
  MssMdp mdp(parse_mss(
      "conditions: a b\ninit:\ngoal: a b\n"
      "operator reach\n  guard: b\n  cost: 1\n  effect: 1 => add(a)\n"
      "operator spin\n  guard:\n  cost: 1\n  effect: 1 =>\n"));
  auto e = enumerate_states(mdp, 10);
  auto m = expl::proper_mask(e);
  CHECK(m[e.index.at(0b00)] == false);
  CHECK(m[e.index.at(0b01)] == false);
  CHECK(m[e.index.at(0b10)] == true);
  CHECK(m[e.index.at(0b11)] == true);
  auto sol = explicit_ssp_oracle(e);
  CHECK(!sol.defined[e.index.at(0b00)]);
  CHECK(sol.value[e.index.at(0b10)] == 1);
}

TEST_CASE("emp oracle hand examples") {
  SUBCASE("self-loop gain is its cost") {
    MssMdp mdp(parse_mss(
        "conditions: a\ninit:\ngoal: a\n"
        "operator spin\n  guard:\n  cost: 3\n  effect: 1 =>\n"));
    auto e = enumerate_states(mdp, 10);
    auto sol = explicit_emp_oracle(e);
    CHECK(sol.value[0] == 3);
    CHECK(sol.value[1] == 3);
  }

  SUBCASE("alternating chain averages the costs") {
    // alternating rem/put costs average to 4, beating put's self-loop at 5
    MssMdp mdp(parse_mss(
        "conditions: a\ninit:\ngoal: a\n"
        "operator rem\n  guard: a\n  cost: 3\n  effect: 1 => del(a)\n"
        "operator put\n  guard:\n  cost: 5\n  effect: 1 => add(a)\n"));
    auto e = enumerate_states(mdp, 10);
    auto sol = explicit_emp_oracle(e);
    CHECK(sol.value[e.index.at(0)] == 4);
    CHECK(sol.value[e.index.at(1)] == 4);
    CHECK(sol.action_of[e.index.at(1)] == 0);
  }

  SUBCASE("gain-optimal choice between loops") {
    // stay put for 5 per step, or pay 4 once and loop at 1
    MssMdp mdp(parse_mss(
        "conditions: a\ninit:\ngoal: a\n"
        "operator idle\n  guard:\n  cost: 5\n  effect: 1 =>\n"
        "operator move\n  guard:\n  cost: 4\n  effect: 1 => add(a)\n"
        "operator rest\n  guard: a\n  cost: 1\n  effect: 1 =>\n"));
    auto e = enumerate_states(mdp, 10);
    auto sol = explicit_emp_oracle(e);
    CHECK(sol.value[e.index.at(0)] == 1);
    CHECK(sol.value[e.index.at(1)] == 1);
    CHECK(sol.action_of[e.index.at(1)] == 2);
  }
}

TEST_CASE("lump oracle basics") {
  SUBCASE("exchangeable states collapse") {
    MssMdp mdp(parse_mss(
        "conditions: a\ninit:\ngoal: a\n"
        "operator mix\n  guard:\n  cost: 1\n  effect: 1/2 => add(a)\n  effect: 1/2 => del(a)\n"));
    auto e = enumerate_states(mdp, 10);
    auto blocks = explicit_lump_oracle(e, {0, 0});
    CHECK(blocks[0] == blocks[1]);
  }

  SUBCASE("cost difference separates") {
    MssMdp mdp(parse_mss(
        "conditions: a\ninit:\ngoal: a\n"
        "operator pricey\n  guard: a\n  cost: 2\n  effect: 1 =>\n"
        "operator cheap\n  guard:\n  cost: 1\n  effect: 1 =>\n"));
    auto e = enumerate_states(mdp, 10);
    std::vector<int> act(e.states.size());
    for (std::size_t i = 0; i < act.size(); ++i) act[i] = e.enabled[i][0];
    auto blocks = explicit_lump_oracle(e, act);
    CHECK(blocks[e.index.at(0)] != blocks[e.index.at(1)]);
  }
}
