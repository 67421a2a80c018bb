// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ecoop/greedy.hpp"
#include "ecoop/model.hpp"

namespace ecoop {

/// Known (planned-for) component plus the realized energies.
struct DecomposedProfile {
  NetEnergyProfile deterministic;
  NetEnergyProfile realized;

  void validate(std::size_t n_slots) const;
};

/// Energy left for the online layer at each BS once the planned action is
/// applied to the realized energies:
///   E_i + w_i - c_i + alpha*d_i - x_out + beta*x_in   (planned fields).
NetEnergyProfile residual_profile(const DecomposedProfile& decomposed, const Trajectory& offline,
                                  const SystemParams& params);

/// Online half of the hybrid policy. The planned trajectory is fixed up
/// front; realized energies arrive one slot at a time through step().
class HybridController {
 public:
  HybridController(const SystemParams& params, Trajectory offline,
                   GreedyMode mode = GreedyMode::kStandard);

  /// Consumes the realized energies of the next slot and returns the
  /// combined action for it. Throws InvalidState past the horizon.
  ControlAction step(double e1, double e2);

  std::size_t slot() const { return t_; }
  bool done() const { return t_ == offline_.size(); }

  const Trajectory& offline() const { return offline_; }
  const Trajectory& online() const { return online_; }
  const Trajectory& combined() const { return combined_; }
  const std::vector<std::string>& cases() const { return cases_; }
  /// Residual energies seen by the online layer, including any forced release.
  const NetEnergyProfile& residual() const { return residual_; }

 private:
  SystemParams params_;
  GreedyMode mode_;
  Trajectory offline_;
  Trajectory online_;
  Trajectory combined_;
  NetEnergyProfile residual_;
  std::vector<std::string> cases_;
  std::size_t t_ = 0;
};

struct HybridRun {
  Trajectory combined;
  Trajectory offline;
  Trajectory online;
  NetEnergyProfile residual;
  std::vector<std::string> cases;
};

/// Plans offline on the deterministic part, then feeds the realized
/// energies slot by slot to a HybridController.
HybridRun run_hybrid_detailed(const SystemParams& params, const DecomposedProfile& decomposed,
                              GreedyMode mode = GreedyMode::kStandard);
Trajectory run_hybrid(const SystemParams& params, const DecomposedProfile& decomposed,
                      GreedyMode mode = GreedyMode::kStandard);

}  // namespace ecoop
