// SPDX-License-Identifier: Apache-2.0
#include "ecoop/hybrid.hpp"

#include <algorithm>

#include "ecoop/errors.hpp"
#include "ecoop/offline.hpp"

namespace ecoop {

void DecomposedProfile::validate(std::size_t n_slots) const {
  deterministic.validate(n_slots);
  realized.validate(n_slots);
}

namespace {

double online_energy(const SystemParams& params, std::size_t i, double e, const ControlAction& a) {
  return e + a.w[i] - a.c[i] + params.alpha * a.d[i] - a.sent_by(i) +
         params.beta * a.received_by(i);
}

}  // namespace

NetEnergyProfile residual_profile(const DecomposedProfile& decomposed, const Trajectory& offline,
                                  const SystemParams& params) {
  const std::size_t n = decomposed.realized.size();
  if (decomposed.deterministic.size() != n || offline.size() != n) {
    throw LengthMismatch("profile and planned trajectory lengths differ");
  }
  NetEnergyProfile out;
  out.e1.resize(n);
  out.e2.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < 2; ++i) {
      out.e(i)[t] = online_energy(params, i, decomposed.realized.e(i)[t], offline.actions[t]);
    }
  }
  return out;
}

HybridController::HybridController(const SystemParams& params, Trajectory offline, GreedyMode mode)
    : params_(params), mode_(mode), offline_(std::move(offline)) {
  params_.validate();
  check_mode(params_, mode_);
  if (offline_.states.size() != offline_.actions.size() + 1) {
    throw LengthMismatch("planned trajectory needs N+1 states");
  }
  online_.states.push_back(StorageState{});
  combined_.states.push_back(offline_.states.front());
}

ControlAction HybridController::step(double e1, double e2) {
  if (done()) {
    throw InvalidState("no slots left in the planned horizon");
  }
  const std::size_t t = t_;
  const ControlAction& planned = offline_.actions[t];
  StorageState s = online_.states.back();

  // The online layer may only use what the plan leaves free after this slot.
  PerBs caps;
  ControlAction released;
  PerBs energy{online_energy(params_, 0, e1, planned), online_energy(params_, 1, e2, planned)};
  for (std::size_t i = 0; i < 2; ++i) {
    caps[i] = std::max(0.0, params_.s_max - offline_.states[t + 1][i]);
    if (s[i] > caps[i]) {
      const double q = s[i] - caps[i];
      released.d[i] = q;
      energy[i] += params_.alpha * q;
      s[i] = caps[i];
    }
  }

  GreedyStep g = greedy_step_capped(params_, s, energy[0], energy[1], caps, mode_);
  const ControlAction online_action = g.action + released;
  const ControlAction combined_action = planned + online_action;

  online_.actions.push_back(online_action);
  online_.states.push_back(g.next);
  StorageState total;
  for (std::size_t i = 0; i < 2; ++i) {
    total[i] = std::min(offline_.states[t + 1][i] + g.next[i], params_.s_max);
  }
  combined_.actions.push_back(combined_action);
  combined_.states.push_back(total);
  residual_.e1.push_back(energy[0]);
  residual_.e2.push_back(energy[1]);
  cases_.push_back(std::move(g.case_label));
  ++t_;
  return combined_action;
}

HybridRun run_hybrid_detailed(const SystemParams& params, const DecomposedProfile& decomposed,
                              GreedyMode mode) {
  params.validate();
  decomposed.validate(params.n_slots);
  HybridController ctl(params, plan_offline(params, decomposed.deterministic), mode);
  for (std::size_t t = 0; t < params.n_slots; ++t) {
    ctl.step(decomposed.realized.e1[t], decomposed.realized.e2[t]);
  }
  HybridRun run;
  run.combined = ctl.combined();
  run.offline = ctl.offline();
  run.online = ctl.online();
  run.residual = ctl.residual();
  run.cases = ctl.cases();
  return run;
}

Trajectory run_hybrid(const SystemParams& params, const DecomposedProfile& decomposed,
                      GreedyMode mode) {
  return run_hybrid_detailed(params, decomposed, mode).combined;
}

}  // namespace ecoop
