// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "ecoop/lp.hpp"
#include "ecoop/model.hpp"

namespace ecoop {

/// Column layout of the horizon programs. Each slot owns one block of
/// action variables; storage levels s_i(0..N) follow all blocks.
struct OfflineLayout {
  std::size_t n_slots = 0;
  std::size_t n_bs = 2;

  std::size_t block() const { return n_bs == 2 ? 8 : 3; }
  std::size_t w(std::size_t i, std::size_t t) const { return block() * t + i; }
  std::size_t c(std::size_t i, std::size_t t) const { return block() * t + n_bs + i; }
  std::size_t d(std::size_t i, std::size_t t) const { return block() * t + 2 * n_bs + i; }
  std::size_t x12(std::size_t t) const { return block() * t + 6; }
  std::size_t x21(std::size_t t) const { return block() * t + 7; }
  std::size_t s(std::size_t i, std::size_t t) const {
    return block() * n_slots + n_bs * t + i;
  }
  std::size_t num_vars() const { return block() * n_slots + n_bs * (n_slots + 1); }
};

/// Budget slack added to the stage-1 optimum in the storage pass.
double lex_slack(double v1);

/// Minimize total grid draw over the horizon.
LpProblem build_stage1(const SystemParams& params, const NetEnergyProfile& profile);

/// Maximize s_1(N) + s_2(N) subject to total grid draw <= v1 + lex_slack(v1).
LpProblem build_stage2(const SystemParams& params, const NetEnergyProfile& profile, double v1);

/// Reads a trajectory out of a horizon-program solution, normalizing each
/// slot's action.
Trajectory extract_trajectory(const SystemParams& params, const OfflineLayout& layout,
                              const std::vector<double>& x);

struct OfflinePlan {
  Trajectory trajectory;
  double stage1_cost = 0.0;   ///< v1
  double terminal_storage = 0.0;
  std::size_t iterations = 0;
};

/// Both passes. Throws SolverError if either LP fails.
OfflinePlan plan_offline_detailed(const SystemParams& params, const NetEnergyProfile& profile);
Trajectory plan_offline(const SystemParams& params, const NetEnergyProfile& profile);

/// Cost-only variant: the stage-1 trajectory, without the storage pass.
Trajectory plan_offline_min_cost(const SystemParams& params, const NetEnergyProfile& profile);

/// One isolated BS with net energy e (uses s_init[0]). The BS-2 fields of
/// the returned trajectory are zero.
Trajectory plan_single_bs(const SystemParams& params, const std::vector<double>& e);

}  // namespace ecoop
