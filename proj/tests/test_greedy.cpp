// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "ecoop/errors.hpp"
#include "ecoop/greedy.hpp"
#include "ecoop/offline.hpp"
#include "ecoop/profiles.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace ecoop;
using ecoop::testing::Rng;

namespace {

SystemParams params(double alpha, double beta, double s_max, std::size_t n = 1) {
  SystemParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.s_max = s_max;
  p.n_slots = n;
  return p;
}

StorageState state(double s1, double s2) {
  StorageState s;
  s[0] = s1;
  s[1] = s2;
  return s;
}

}  // namespace

TEST_CASE("empty storage and double deficit draws from the grid") {
  const GreedyStep g = greedy_step(params(0.9, 0.8, 1.0), state(0, 0), -1.0, -1.0);
  CHECK(g.action.w[0] == 1.0);
  CHECK(g.action.w[1] == 1.0);
  CHECK(g.action.c[0] + g.action.c[1] + g.action.d[0] + g.action.d[1] == 0.0);
  CHECK(g.action.x12 + g.action.x21 == 0.0);
  CHECK(g.case_label == "both_deficit:grid");
}

TEST_CASE("double surplus fills own storage then the neighbour's") {
  const SystemParams p = params(0.9, 0.8, 1.0);
  const GreedyStep g = greedy_step(p, state(0, 0), 2.0, 0.5);
  CHECK(g.case_label == "both_surplus");
  CHECK(g.action.c[0] == doctest::Approx(1.0 / 0.9).epsilon(1e-12));
  CHECK(g.action.x12 == doctest::Approx(2.0 - 1.0 / 0.9).epsilon(1e-12));
  CHECK(g.action.c[1] == doctest::Approx(0.5 + 0.55 / 0.9).epsilon(1e-12));
  CHECK(g.next[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.next[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.action.grid_total() == 0.0);

  const GreedyStep o = greedy_step_lp(p, state(0, 0), 2.0, 0.5, default_gamma(p));
  CHECK(o.action.grid_total() == doctest::Approx(0.0));
  CHECK(o.next[0] + o.next[1] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("transfer-first when transmission beats a storage round trip") {
  const SystemParams p = params(0.9, 0.95, 1.0);
  const GreedyStep g = greedy_step(p, state(0.5, 0.2), 0.3, -1.0);
  CHECK(g.case_label == "transfer_first:1to2:short");
  CHECK(g.action.x12 == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(g.action.d[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(g.action.d[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.action.w[0] == 0.0);
  CHECK(g.action.w[1] == doctest::Approx(0.1075).epsilon(1e-12));
  CHECK(g.next[0] == doctest::Approx(0.0));
  CHECK(g.next[1] == doctest::Approx(0.0));

  const GreedyStep o = greedy_step_lp(p, state(0.5, 0.2), 0.3, -1.0, default_gamma(p));
  CHECK(std::abs(o.action.grid_total() - 0.1075) <= 1e-9);
  CHECK(std::abs(o.next[0] + o.next[1]) <= 1e-9);
}

TEST_CASE("one-slot LP oracle on zero input") {
  const SystemParams p = params(0.9, 0.8, 1.0);
  const GreedyStep o = greedy_step_lp(p, state(0, 0), 0.0, 0.0, default_gamma(p));
  CHECK(o.action.grid_total() == 0.0);
  CHECK(o.next[0] + o.next[1] == 0.0);
  CHECK(o.case_label == "lp");
}

TEST_CASE("closed form agrees with the one-slot LP") {
  const auto out = testing::greedy_oracle_suite(99, 1000, 1e-7);
  INFO(out.cost.first_failure << out.storage.first_failure);
  CHECK(out.cost.instances == 1000);
  CHECK(out.cost.ok());
  CHECK(out.storage.ok());
}

TEST_CASE("one-slot LP grid cost equals the one-slot horizon optimum") {
  Rng rng(12);
  for (int k = 0; k < 1000; ++k) {
    SystemParams p = testing::random_params(rng, 1);
    const StorageState s = state(rng.uniform(0, p.s_max), rng.uniform(0, p.s_max));
    const double e1 = rng.uniform(-3, 3), e2 = rng.uniform(-3, 3);
    const GreedyStep o = greedy_step_lp(p, s, e1, e2, default_gamma(p));
    p.s_init = s;
    const LpSolution h = lp_solve(build_stage1(p, NetEnergyProfile::from_net({e1}, {e2})));
    REQUIRE(h.status == LpStatus::kOptimal);
    INFO("instance " << k);
    CHECK(std::abs(o.action.grid_total() - h.objective_value) <= 1e-7);
  }
}

TEST_CASE("a short-of-need receiver never charges") {
  Rng rng(21);
  int relevant = 0;
  for (int k = 0; k < 5000; ++k) {
    const SystemParams p = testing::random_params(rng, 1);
    const StorageState s = state(rng.uniform(0, p.s_max), rng.uniform(0, p.s_max));
    const double giver = rng.uniform(0, 3), taker = -rng.open_closed(0, 3);
    const bool flip = rng.coin();
    const GreedyStep g = flip ? greedy_step(p, s, taker, giver) : greedy_step(p, s, giver, taker);
    const std::size_t r = flip ? 0 : 1;
    const double sent = flip ? g.action.x21 : g.action.x12;
    if (p.beta * sent <= -taker + 1e-12 && g.action.w[r] <= 1e-12) {
      ++relevant;
      INFO("instance " << k << " " << g.case_label);
      CHECK(g.action.c[r] <= 1e-12);
    }
  }
  CHECK(relevant > 500);
}

TEST_CASE("every step is labelled with exactly one case") {
  const std::set<std::string> known{
      "both_surplus",
      "both_deficit:grid",
      "both_deficit:covered",
      "both_deficit:assist_1to2",
      "both_deficit:assist_2to1",
  };
  Rng rng(5);
  std::set<std::string> seen;
  for (int k = 0; k < 3000; ++k) {
    const SystemParams p = testing::random_params(rng, 1);
    const StorageState s = state(rng.uniform(0, p.s_max), rng.uniform(0, p.s_max));
    const double e1 = rng.uniform(-3, 3), e2 = rng.uniform(-3, 3);
    const std::string label = greedy_step(p, s, e1, e2).case_label;
    seen.insert(label);
    const bool mixed = (e1 >= 0) != (e2 >= 0);
    if (mixed) {
      const std::string family = p.beta >= p.alpha * p.alpha ? "transfer_first:" : "store_first:";
      const std::string dir = e1 >= 0 ? "1to2:" : "2to1:";
      CHECK(label.rfind(family + dir, 0) == 0);
    } else {
      CHECK(known.count(label) == 1);
    }
  }
  for (const char* l : {"transfer_first:1to2:covered", "transfer_first:2to1:short",
                        "store_first:1to2:split", "store_first:2to1:all_transfer",
                        "both_deficit:assist_1to2", "both_deficit:covered"}) {
    CHECK_MESSAGE(seen.count(l) == 1, l);
  }
}

TEST_CASE("mode and argument errors") {
  CHECK_THROWS_AS(greedy_step(params(0.0, 0.8, 1.0), state(0, 0), 1, -1), ValidationError);
  CHECK_THROWS_AS(greedy_step(params(0.9, 0.0, 1.0), state(0, 0), 1, -1), ValidationError);
  CHECK_NOTHROW(greedy_step(params(0.0, 0.8, 1.0), state(0, 0), 1, -1, GreedyMode::kNoStorage));
  CHECK_NOTHROW(greedy_step(params(0.9, 0.0, 1.0), state(0, 0), 1, -1, GreedyMode::kNoTransfer));
  CHECK_THROWS_AS(greedy_step(params(0.9, 0.8, 1.0), state(1.5, 0), 1, -1), InvalidState);
  CHECK_THROWS_AS(parse_greedy_mode("bogus"), ValidationError);
  CHECK(parse_greedy_mode("force_case_2a") == GreedyMode::kForceTransferFirst);
  CHECK(to_string(GreedyMode::kNoTransfer) == "no_transfer");
  const SystemParams p = params(0.9, 0.8, 1.0);
  CHECK_THROWS_AS(greedy_step_lp(p, state(0, 0), 1, -1, 0.0), GammaOutOfRange);
  CHECK_THROWS_AS(greedy_step_lp(p, state(0, 0), 1, -1, p.alpha * p.beta), GammaOutOfRange);
}

TEST_CASE("per-BS caps bound the next state") {
  Rng rng(44);
  for (int k = 0; k < 1000; ++k) {
    const SystemParams p = testing::random_params(rng, 1);
    PerBs caps{rng.uniform(0, p.s_max), rng.uniform(0, p.s_max)};
    const StorageState s = state(rng.uniform(0, caps[0]), rng.uniform(0, caps[1]));
    const GreedyStep g = greedy_step_capped(p, s, rng.uniform(-3, 3), rng.uniform(-3, 3), caps);
    CHECK(g.next[0] <= caps[0] + 1e-12);
    CHECK(g.next[1] <= caps[1] + 1e-12);
    CHECK(g.next[0] >= 0.0);
    CHECK(g.next[1] >= 0.0);
  }
}

TEST_CASE("rollouts") {
  Rng rng(8);
  SystemParams p = testing::random_params(rng, 10);
  CHECK(run_greedy(p, testing::random_profile(rng, 10, 0.0, 3.0)).total_cost() == 0.0);

  const NetEnergyProfile prof = testing::random_profile(rng, 10);
  const GreedyRun run = run_greedy_detailed(p, prof);
  CHECK(run.cases.size() == 10);
  CHECK(check_feasible(p, prof, run.trajectory).empty());

  // Without storage the greedy rule is optimal for any profile.
  for (int k = 0; k < 50; ++k) {
    SystemParams q = testing::random_params(rng, rng.index(1, 12));
    q.alpha = 0.0;
    const NetEnergyProfile r = testing::random_profile(rng, q.n_slots);
    const Trajectory g = run_greedy(q, r, GreedyMode::kNoStorage);
    CHECK(check_feasible(q, r, g).empty());
    CHECK(std::abs(g.total_cost() - plan_offline_detailed(q, r).stage1_cost) <= 1e-6);
  }
}

TEST_CASE("optimality on special profiles") {
  using namespace ecoop::testing;
  FeasibilityAudit audit;
  const SuiteOutcome suites[] = {
      dominance_suite(1, 100, 20, 1e-6, &audit),
      boundary_beta_suite(0.0, 2, 50, 20, 1e-6, &audit),
      boundary_beta_suite(1.0, 3, 50, 20, 1e-6, &audit),
      surplus_sender_suite(4, 50, 10, 1e-6, &audit),
      fixed_roles_suite(5, 50, 20, 1e-6, &audit),
  };
  for (const SuiteOutcome& s : suites) {
    INFO(s.first_failure << " worst " << s.worst);
    CHECK(s.ok());
  }
  CHECK(audit.infeasible == 0);
  CHECK(audit.max_complementarity <= 1e-9);
}

TEST_CASE("small loss on the sinusoid benchmark") {
  const double w = 2.0 * std::numbers::pi / 24.0;
  const SystemParams p = params(0.9, 0.8, 1.0, 240);
  for (double theta : {std::numbers::pi / 2, std::numbers::pi}) {
    const NetEnergyProfile prof = sinusoid(3.0, w, theta, 240);
    const double g = run_greedy(p, prof).total_cost();
    const double o = plan_offline_detailed(p, prof).stage1_cost;
    CHECK(g >= o - 1e-6);
    CHECK(g <= 1.03 * o);
  }
}
