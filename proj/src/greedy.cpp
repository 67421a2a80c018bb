// SPDX-License-Identifier: Apache-2.0
#include "ecoop/greedy.hpp"

#include <algorithm>
#include <cmath>

#include "ecoop/errors.hpp"
#include "ecoop/lp.hpp"

namespace ecoop {

std::string to_string(GreedyMode mode) {
  switch (mode) {
    case GreedyMode::kStandard: return "standard";
    case GreedyMode::kForceTransferFirst: return "force_case_2a";
    case GreedyMode::kNoStorage: return "no_storage";
    case GreedyMode::kNoTransfer: return "no_transfer";
  }
  return "unknown";
}

GreedyMode parse_greedy_mode(const std::string& name) {
  if (name == "standard") return GreedyMode::kStandard;
  if (name == "force_case_2a") return GreedyMode::kForceTransferFirst;
  if (name == "no_storage") return GreedyMode::kNoStorage;
  if (name == "no_transfer") return GreedyMode::kNoTransfer;
  throw ValidationError("unknown greedy mode '" + name + "'");
}

void check_mode(const SystemParams& params, GreedyMode mode) {
  if (mode == GreedyMode::kStandard || mode == GreedyMode::kForceTransferFirst) {
    if (params.alpha <= 0.0) {
      throw ValidationError("alpha = 0 requires greedy mode no_storage");
    }
    if (params.beta <= 0.0) {
      throw ValidationError("beta = 0 requires greedy mode no_transfer");
    }
  }
}

double default_gamma(const SystemParams& params) { return 0.5 * params.alpha * params.beta; }

namespace {

const char* direction(std::size_t k) { return k == 0 ? "1to2" : "2to1"; }

class StepBuilder {
 public:
  StepBuilder(double alpha, double beta, const StorageState& s, const PerBs& caps)
      : a_(alpha), b_(beta), s_(s), cap_(caps) {}

  double room(std::size_t i) const {
    return std::max(0.0, cap_[i] - (s_[i] + a_ * act_.c[i] - act_.d[i]));
  }
  double avail(std::size_t i) const { return std::max(0.0, s_[i] - act_.d[i]); }

  /// Stores as much of `amount` as fits; returns what is left.
  double charge_local(std::size_t i, double amount) {
    if (a_ <= 0.0 || amount <= 0.0) return amount;
    const double r = room(i);
    if (amount * a_ <= r) {
      act_.c[i] += amount;
      return 0.0;
    }
    act_.c[i] += r / a_;
    return amount - r / a_;
  }

  /// Covers `deficit` from own storage; returns the uncovered part.
  double discharge_local(std::size_t j, double deficit) {
    if (a_ <= 0.0 || deficit <= 0.0) return deficit;
    const double have = avail(j);
    if (deficit <= a_ * have) {
      act_.d[j] += deficit / a_;
      return 0.0;
    }
    act_.d[j] += have;
    return deficit - a_ * have;
  }

  /// BS k discharges and ships energy to cover j's deficit; grid covers the rest.
  void cover_remote(std::size_t k, std::size_t j, double deficit) {
    if (deficit > 0.0 && a_ > 0.0 && b_ > 0.0) {
      const double have = avail(k);
      const double yield = a_ * b_;
      if (deficit <= yield * have) {
        act_.d[k] += deficit / yield;
        act_.sent_by(k) += deficit / b_;
        deficit = 0.0;
      } else {
        act_.d[k] += have;
        act_.sent_by(k) += a_ * have;
        deficit -= yield * have;
      }
    }
    act_.w[j] += std::max(0.0, deficit);
  }

  /// Charges k with `left`, then ships the remainder into j's storage.
  void spread_surplus(std::size_t k, std::size_t j, double left) {
    left = charge_local(k, left);
    if (left <= 0.0 || b_ <= 0.0 || a_ <= 0.0) return;
    const double r = room(j);
    if (r <= 0.0) return;
    act_.sent_by(k) += left;
    act_.c[j] += std::min(b_ * left, r / a_);
  }

  void both_surplus(double e1, double e2) {
    const double left1 = charge_local(0, e1);
    const double left2 = charge_local(1, e2);
    if (left1 > 0.0) {
      spread_surplus(0, 1, left1);
    } else if (left2 > 0.0) {
      spread_surplus(1, 0, left2);
    }
    label_ = "both_surplus";
  }

  void transfer_first(std::size_t k, std::size_t j, double ek, double deficit, const char* tag) {
    if (b_ * ek >= deficit) {
      const double x = deficit / b_;
      act_.sent_by(k) += x;
      spread_surplus(k, j, ek - x);
      label_ = std::string(tag) + ":" + direction(k) + ":covered";
      return;
    }
    act_.sent_by(k) += ek;
    double rest = deficit - b_ * ek;
    rest = discharge_local(j, rest);
    cover_remote(k, j, rest);
    label_ = std::string(tag) + ":" + direction(k) + ":short";
  }

  void store_first(std::size_t k, std::size_t j, double ek, double deficit) {
    if (deficit >= b_ * ek + a_ * s_[j]) {
      act_.sent_by(k) += ek;
      double rest = deficit - b_ * ek;
      rest = discharge_local(j, rest);
      cover_remote(k, j, rest);
      label_ = std::string("store_first:") + direction(k) + ":all_transfer";
      return;
    }
    double x = std::max({(deficit - a_ * s_[j]) / b_, ek - room(k) / a_, 0.0});
    x = std::min(x, ek);
    act_.sent_by(k) += x;
    act_.c[k] += ek - x;
    const double rest = deficit - b_ * x;
    if (rest > 0.0) {
      act_.w[j] += std::max(0.0, discharge_local(j, rest));
    } else {
      act_.c[j] += std::min(room(j) / a_, -rest);
    }
    label_ = std::string("store_first:") + direction(k) + ":split";
  }

  void both_deficit(double d1, double d2) {
    const double r1 = discharge_local(0, d1);
    const double r2 = discharge_local(1, d2);
    if (r1 > 0.0 && r2 > 0.0) {
      act_.w[0] += r1;
      act_.w[1] += r2;
      label_ = "both_deficit:grid";
    } else if (r1 > 0.0) {
      cover_remote(1, 0, r1);
      label_ = "both_deficit:assist_2to1";
    } else if (r2 > 0.0) {
      cover_remote(0, 1, r2);
      label_ = "both_deficit:assist_1to2";
    } else {
      label_ = "both_deficit:covered";
    }
  }

  void no_storage(double e1, double e2) {
    label_ = "no_storage";
    for (std::size_t j = 0; j < 2; ++j) {
      const double ej = j == 0 ? e1 : e2;
      const double ek = j == 0 ? e2 : e1;
      if (ej >= 0.0) continue;
      double deficit = -ej;
      if (ek > 0.0 && b_ > 0.0) {
        const std::size_t k = 1 - j;
        if (b_ * ek >= deficit) {
          act_.sent_by(k) += deficit / b_;
          deficit = 0.0;
        } else {
          act_.sent_by(k) += ek;
          deficit -= b_ * ek;
        }
      }
      act_.w[j] += deficit;
    }
  }

  void no_transfer(double e1, double e2) {
    label_ = "no_transfer";
    for (std::size_t i = 0; i < 2; ++i) {
      const double e = i == 0 ? e1 : e2;
      if (e >= 0.0) {
        charge_local(i, e);
      } else {
        act_.w[i] += discharge_local(i, -e);
      }
    }
  }

  GreedyStep finish() const {
    GreedyStep out;
    out.action = act_;
    for (std::size_t i = 0; i < 2; ++i) {
      out.next[i] = std::clamp(s_[i] + a_ * act_.c[i] - act_.d[i], 0.0, cap_[i]);
    }
    out.case_label = label_;
    return out;
  }

 private:
  double a_, b_;
  StorageState s_;
  PerBs cap_;
  ControlAction act_;
  std::string label_;
};

void check_state(const StorageState& state, const PerBs& caps) {
  for (std::size_t i = 0; i < 2; ++i) {
    if (!(state[i] >= -kFeasibilityTol && state[i] <= caps[i] + kFeasibilityTol)) {
      throw InvalidState("BS " + std::to_string(i + 1) + " storage " + std::to_string(state[i]) +
                         " outside [0, " + std::to_string(caps[i]) + "]");
    }
  }
}

}  // namespace

GreedyStep greedy_step(const SystemParams& params, const StorageState& state, double e1, double e2,
                       GreedyMode mode) {
  return greedy_step_capped(params, state, e1, e2, {params.s_max, params.s_max}, mode);
}

GreedyStep greedy_step_capped(const SystemParams& params, const StorageState& state, double e1,
                              double e2, const PerBs& caps, GreedyMode mode) {
  check_mode(params, mode);
  check_state(state, caps);
  if (!std::isfinite(e1) || !std::isfinite(e2)) {
    throw ValidationError("non-finite net energy");
  }
  StorageState s = state;
  for (std::size_t i = 0; i < 2; ++i) s[i] = std::clamp(s[i], 0.0, std::max(0.0, caps[i]));

  const bool surplus1 = e1 >= -kSignTol;
  const bool surplus2 = e2 >= -kSignTol;
  if (surplus1) e1 = std::max(e1, 0.0);
  if (surplus2) e2 = std::max(e2, 0.0);

  StepBuilder b(params.alpha, params.beta, s, caps);
  if (mode == GreedyMode::kNoStorage) {
    b.no_storage(e1, e2);
    return b.finish();
  }
  if (mode == GreedyMode::kNoTransfer) {
    b.no_transfer(e1, e2);
    return b.finish();
  }

  const bool transfer_first = mode == GreedyMode::kForceTransferFirst ||
                              params.beta >= params.alpha * params.alpha;
  if (surplus1 && surplus2) {
    b.both_surplus(e1, e2);
  } else if (!surplus1 && !surplus2) {
    b.both_deficit(-e1, -e2);
  } else {
    const std::size_t k = surplus1 ? 0 : 1;
    const std::size_t j = 1 - k;
    const double ek = surplus1 ? e1 : e2;
    const double deficit = surplus1 ? -e2 : -e1;
    if (transfer_first) {
      b.transfer_first(k, j, ek, deficit, "transfer_first");
    } else {
      b.store_first(k, j, ek, deficit);
    }
  }
  return b.finish();
}

GreedyStep greedy_step_lp(const SystemParams& params, const StorageState& state, double e1,
                          double e2, double gamma) {
  const double ab = params.alpha * params.beta;
  if (!(gamma > 0.0 && gamma < ab)) {
    throw GammaOutOfRange("gamma must lie strictly between 0 and alpha*beta");
  }
  const PerBs caps{params.s_max, params.s_max};
  check_state(state, caps);
  const double a = params.alpha;
  const double e[2] = {e1, e2};

  // Column order: w1 w2 c1 c2 d1 d2 x12 x21.
  LpProblem p;
  for (std::size_t i = 0; i < 2; ++i) p.add_variable("w" + std::to_string(i + 1), 1.0);
  for (std::size_t i = 0; i < 2; ++i) p.add_variable("c" + std::to_string(i + 1), -gamma * a);
  for (std::size_t i = 0; i < 2; ++i) {
    p.add_variable("d" + std::to_string(i + 1), gamma, 0.0, std::max(0.0, state[i]));
  }
  p.add_variable("x12");
  p.add_variable("x21");
  for (std::size_t i = 0; i < 2; ++i) {
    const std::size_t out = i == 0 ? 6 : 7;
    const std::size_t in = i == 0 ? 7 : 6;
    p.add_ub({{i, -1.0}, {2 + i, 1.0}, {4 + i, -a}, {out, 1.0}, {in, -params.beta}}, e[i],
             "bal" + std::to_string(i + 1));
    p.add_ub({{2 + i, a}, {4 + i, -1.0}}, params.s_max - state[i], "cap" + std::to_string(i + 1));
    p.add_ub({{2 + i, -a}, {4 + i, 1.0}}, state[i], "floor" + std::to_string(i + 1));
  }
  const LpSolution sol = lp_solve(p);
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError("one-step LP is " + to_string(sol.status));
  }
  ControlAction act;
  for (std::size_t i = 0; i < 2; ++i) {
    act.w[i] = sol.x[i];
    act.c[i] = sol.x[2 + i];
    act.d[i] = sol.x[4 + i];
  }
  act.x12 = sol.x[6];
  act.x21 = sol.x[7];
  GreedyStep out;
  out.action = normalize_action(act, params.alpha);
  for (std::size_t i = 0; i < 2; ++i) {
    out.next[i] = std::clamp(state[i] + a * out.action.c[i] - out.action.d[i], 0.0, params.s_max);
  }
  out.case_label = "lp";
  return out;
}

GreedyRun run_greedy_detailed(const SystemParams& params, const NetEnergyProfile& profile,
                              GreedyMode mode) {
  params.validate();
  profile.validate(params.n_slots);
  check_mode(params, mode);
  GreedyRun run;
  run.trajectory.states.push_back(params.s_init);
  run.trajectory.actions.reserve(params.n_slots);
  run.cases.reserve(params.n_slots);
  for (std::size_t t = 0; t < params.n_slots; ++t) {
    GreedyStep step =
        greedy_step(params, run.trajectory.states.back(), profile.e1[t], profile.e2[t], mode);
    run.trajectory.actions.push_back(step.action);
    run.trajectory.states.push_back(step.next);
    run.cases.push_back(std::move(step.case_label));
  }
  return run;
}

Trajectory run_greedy(const SystemParams& params, const NetEnergyProfile& profile,
                      GreedyMode mode) {
  return run_greedy_detailed(params, profile, mode).trajectory;
}

}  // namespace ecoop
