// SPDX-License-Identifier: Apache-2.0
#include "ecoop/offline.hpp"

#include <algorithm>
#include <string>

#include "ecoop/errors.hpp"

namespace ecoop {

namespace {

std::string slot_label(const char* name, std::size_t i, std::size_t t) {
  return std::string(name) + std::to_string(i + 1) + "[" + std::to_string(t) + "]";
}

LpProblem build_horizon(const SystemParams& params, const std::vector<const std::vector<double>*>& e,
                        const OfflineLayout& L) {
  const std::size_t n = L.n_slots;
  const std::size_t nb = L.n_bs;
  const double alpha = params.alpha;
  const double beta = params.beta;

  LpProblem p;
  p.objective.assign(L.num_vars(), 0.0);
  p.lower.assign(L.num_vars(), 0.0);
  p.upper.assign(L.num_vars(), kInf);
  p.labels.resize(L.num_vars());

  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < nb; ++i) {
      p.objective[L.w(i, t)] = 1.0;
      p.labels[L.w(i, t)] = slot_label("w", i, t);
      p.labels[L.c(i, t)] = slot_label("c", i, t);
      p.labels[L.d(i, t)] = slot_label("d", i, t);
      if (alpha <= 0.0) {
        p.upper[L.c(i, t)] = 0.0;
        if (params.s_init[i] <= 0.0) p.upper[L.d(i, t)] = 0.0;
      }
    }
    if (nb == 2) {
      p.labels[L.x12(t)] = "x12[" + std::to_string(t) + "]";
      p.labels[L.x21(t)] = "x21[" + std::to_string(t) + "]";
    }
  }
  for (std::size_t t = 0; t <= n; ++t) {
    for (std::size_t i = 0; i < nb; ++i) {
      const std::size_t j = L.s(i, t);
      p.labels[j] = slot_label("s", i, t);
      if (t == 0) {
        p.lower[j] = p.upper[j] = params.s_init[i];
      } else {
        p.upper[j] = params.s_max;
      }
    }
  }

  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < nb; ++i) {
      p.add_eq({{L.s(i, t + 1), 1.0}, {L.s(i, t), -1.0}, {L.c(i, t), -alpha}, {L.d(i, t), 1.0}},
               0.0, slot_label("dyn", i, t));
    }
  }
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < nb; ++i) {
      std::vector<LinearTerm> row{{L.w(i, t), -1.0}, {L.c(i, t), 1.0}, {L.d(i, t), -alpha}};
      if (nb == 2) {
        const std::size_t out = i == 0 ? L.x12(t) : L.x21(t);
        const std::size_t in = i == 0 ? L.x21(t) : L.x12(t);
        row.push_back({out, 1.0});
        row.push_back({in, -beta});
      }
      p.add_ub(std::move(row), (*e[i])[t], slot_label("bal", i, t));
    }
  }
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < nb; ++i) {
      p.add_ub({{L.d(i, t), 1.0}, {L.s(i, t), -1.0}}, 0.0, slot_label("dlim", i, t));
    }
  }
  return p;
}

void check_inputs(const SystemParams& params, const NetEnergyProfile& profile) {
  params.validate();
  profile.validate(params.n_slots);
}

LpSolution solve_or_throw(const LpProblem& p, const char* what) {
  LpSolution sol = lp_solve(p);
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError(std::string(what) + " LP is " + to_string(sol.status));
  }
  return sol;
}

}  // namespace

double lex_slack(double v1) { return 1e-7 * std::max(1.0, v1); }

LpProblem build_stage1(const SystemParams& params, const NetEnergyProfile& profile) {
  check_inputs(params, profile);
  return build_horizon(params, {&profile.e1, &profile.e2}, OfflineLayout{params.n_slots, 2});
}

LpProblem build_stage2(const SystemParams& params, const NetEnergyProfile& profile, double v1) {
  check_inputs(params, profile);
  const OfflineLayout L{params.n_slots, 2};
  LpProblem p = build_horizon(params, {&profile.e1, &profile.e2}, L);
  std::fill(p.objective.begin(), p.objective.end(), 0.0);
  p.objective[L.s(0, L.n_slots)] = -1.0;
  p.objective[L.s(1, L.n_slots)] = -1.0;
  std::vector<LinearTerm> budget;
  for (std::size_t t = 0; t < L.n_slots; ++t) {
    budget.push_back({L.w(0, t), 1.0});
    budget.push_back({L.w(1, t), 1.0});
  }
  p.add_ub(std::move(budget), v1 + lex_slack(v1), "budget");
  return p;
}

Trajectory extract_trajectory(const SystemParams& params, const OfflineLayout& L,
                              const std::vector<double>& x) {
  Trajectory traj;
  traj.actions.resize(L.n_slots);
  traj.states.resize(L.n_slots + 1);
  for (std::size_t t = 0; t < L.n_slots; ++t) {
    ControlAction a;
    for (std::size_t i = 0; i < L.n_bs; ++i) {
      a.w[i] = x[L.w(i, t)];
      a.c[i] = x[L.c(i, t)];
      a.d[i] = x[L.d(i, t)];
    }
    if (L.n_bs == 2) {
      a.x12 = x[L.x12(t)];
      a.x21 = x[L.x21(t)];
    }
    traj.actions[t] = normalize_action(a, params.alpha);
  }
  for (std::size_t t = 0; t <= L.n_slots; ++t) {
    for (std::size_t i = 0; i < L.n_bs; ++i) {
      traj.states[t][i] = std::clamp(x[L.s(i, t)], 0.0, params.s_max);
    }
  }
  return traj;
}

OfflinePlan plan_offline_detailed(const SystemParams& params, const NetEnergyProfile& profile) {
  const OfflineLayout L{params.n_slots, 2};
  const LpSolution first = solve_or_throw(build_stage1(params, profile), "stage-1");
  const LpProblem second_problem = build_stage2(params, profile, first.objective_value);
  const LpSolution second = lp_solve(second_problem);
  if (second.status != LpStatus::kOptimal) {
    throw Stage2Infeasible("stage-2 LP is " + to_string(second.status));
  }
  OfflinePlan plan;
  plan.trajectory = extract_trajectory(params, L, second.x);
  plan.stage1_cost = first.objective_value;
  plan.terminal_storage = -second.objective_value;
  plan.iterations = first.iterations + second.iterations;
  return plan;
}

Trajectory plan_offline(const SystemParams& params, const NetEnergyProfile& profile) {
  return plan_offline_detailed(params, profile).trajectory;
}

Trajectory plan_offline_min_cost(const SystemParams& params, const NetEnergyProfile& profile) {
  const LpSolution sol = solve_or_throw(build_stage1(params, profile), "stage-1");
  return extract_trajectory(params, OfflineLayout{params.n_slots, 2}, sol.x);
}

Trajectory plan_single_bs(const SystemParams& params, const std::vector<double>& e) {
  SystemParams single = params;
  single.s_init[1] = 0.0;
  single.validate();
  if (e.size() != params.n_slots) {
    throw LengthMismatch("single-BS profile has " + std::to_string(e.size()) + " slots, expected " +
                         std::to_string(params.n_slots));
  }
  const OfflineLayout L{params.n_slots, 1};
  const LpSolution sol = solve_or_throw(build_horizon(single, {&e}, L), "single-BS");
  Trajectory traj = extract_trajectory(single, L, sol.x);
  return traj;
}

}  // namespace ecoop
