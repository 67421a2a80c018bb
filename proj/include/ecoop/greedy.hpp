// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ecoop/model.hpp"

namespace ecoop {

enum class GreedyMode {
  kStandard,
  kForceTransferFirst,  ///< transfer-first rule regardless of beta vs alpha^2
  kNoStorage,           ///< storage unused (required when alpha = 0)
  kNoTransfer,          ///< each BS runs alone (required when beta = 0)
};

std::string to_string(GreedyMode mode);
/// Accepts "standard", "force_case_2a", "no_storage", "no_transfer".
GreedyMode parse_greedy_mode(const std::string& name);

/// Net energies at or above -kSignTol count as surplus.
inline constexpr double kSignTol = 1e-12;

struct GreedyStep {
  ControlAction action;
  StorageState next;
  /// Which branch fired, e.g. "both_surplus", "transfer_first:1to2:short",
  /// "store_first:2to1:split", "both_deficit:assist_1to2".
  std::string case_label;
};

/// One-step closed-form controller with storage ceiling s_max for both BSs.
GreedyStep greedy_step(const SystemParams& params, const StorageState& state, double e1, double e2,
                       GreedyMode mode = GreedyMode::kStandard);

/// Same controller with per-BS storage ceilings in place of s_max.
GreedyStep greedy_step_capped(const SystemParams& params, const StorageState& state, double e1,
                              double e2, const PerBs& caps, GreedyMode mode = GreedyMode::kStandard);

double default_gamma(const SystemParams& params);

/// Solves the one-slot program min (w1+w2) - gamma*(alpha*c - d summed)
/// with the LP engine. Requires 0 < gamma < alpha*beta.
GreedyStep greedy_step_lp(const SystemParams& params, const StorageState& state, double e1,
                          double e2, double gamma);

struct GreedyRun {
  Trajectory trajectory;
  std::vector<std::string> cases;
};

GreedyRun run_greedy_detailed(const SystemParams& params, const NetEnergyProfile& profile,
                              GreedyMode mode = GreedyMode::kStandard);
Trajectory run_greedy(const SystemParams& params, const NetEnergyProfile& profile,
                      GreedyMode mode = GreedyMode::kStandard);

/// Throws ValidationError when the mode cannot run with these efficiencies.
void check_mode(const SystemParams& params, GreedyMode mode);

}  // namespace ecoop
