// SPDX-License-Identifier: Apache-2.0
#include "ecoop/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ecoop/errors.hpp"

namespace ecoop {

namespace {

bool finite(double v) { return std::isfinite(v); }

void check_length(const std::vector<double>& v, std::size_t n, const char* name) {
  if (v.size() != n) {
    throw LengthMismatch(std::string(name) + " has " + std::to_string(v.size()) +
                         " entries, expected " + std::to_string(n));
  }
}

}  // namespace

void SystemParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in [0, 1]");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ValidationError("beta must lie in [0, 1]");
  }
  if (!(s_max >= 0.0) || !finite(s_max)) {
    throw ValidationError("s_max must be finite and nonnegative");
  }
  if (n_slots < 1) {
    throw ValidationError("n_slots must be at least 1");
  }
  for (std::size_t i = 0; i < 2; ++i) {
    if (!(s_init[i] >= 0.0 && s_init[i] <= s_max)) {
      throw ValidationError("initial storage of BS " + std::to_string(i + 1) +
                            " outside [0, s_max]");
    }
  }
}

NetEnergyProfile NetEnergyProfile::from_net(std::vector<double> e1, std::vector<double> e2) {
  NetEnergyProfile p;
  p.e1 = std::move(e1);
  p.e2 = std::move(e2);
  return p;
}

NetEnergyProfile NetEnergyProfile::from_components(std::vector<double> re1,
                                                   std::vector<double> de1,
                                                   std::vector<double> re2,
                                                   std::vector<double> de2) {
  const std::size_t n = re1.size();
  check_length(de1, n, "DE1");
  check_length(re2, n, "RE2");
  check_length(de2, n, "DE2");
  NetEnergyProfile p;
  p.e1.resize(n);
  p.e2.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    p.e1[t] = re1[t] - de1[t];
    p.e2[t] = re2[t] - de2[t];
  }
  p.re1 = std::move(re1);
  p.de1 = std::move(de1);
  p.re2 = std::move(re2);
  p.de2 = std::move(de2);
  return p;
}

void NetEnergyProfile::validate(std::size_t n_slots) const {
  check_length(e1, n_slots, "E1");
  check_length(e2, n_slots, "E2");
  for (std::size_t t = 0; t < n_slots; ++t) {
    if (!finite(e1[t]) || !finite(e2[t])) {
      throw ValidationError("non-finite net energy at slot " + std::to_string(t));
    }
  }
  if (!has_components()) {
    return;
  }
  check_length(re1, n_slots, "RE1");
  check_length(de1, n_slots, "DE1");
  check_length(re2, n_slots, "RE2");
  check_length(de2, n_slots, "DE2");
  for (std::size_t t = 0; t < n_slots; ++t) {
    if (re1[t] < 0.0 || de1[t] < 0.0 || re2[t] < 0.0 || de2[t] < 0.0) {
      throw ValidationError("negative renewable or demand energy at slot " + std::to_string(t));
    }
    if (e1[t] != re1[t] - de1[t] || e2[t] != re2[t] - de2[t]) {
      throw ValidationError("net energy differs from RE - DE at slot " + std::to_string(t));
    }
  }
}

ControlAction operator+(const ControlAction& a, const ControlAction& b) {
  ControlAction r;
  for (std::size_t i = 0; i < 2; ++i) {
    r.w[i] = a.w[i] + b.w[i];
    r.c[i] = a.c[i] + b.c[i];
    r.d[i] = a.d[i] + b.d[i];
  }
  r.x12 = a.x12 + b.x12;
  r.x21 = a.x21 + b.x21;
  return r;
}

double Trajectory::total_cost() const { return ecoop::total_cost(*this, 0); }

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kNonnegativity: return "nonnegativity";
    case ConstraintKind::kDischargeLimit: return "discharge-limit";
    case ConstraintKind::kDynamics: return "dynamics";
    case ConstraintKind::kStorageLower: return "storage-lower";
    case ConstraintKind::kStorageUpper: return "storage-upper";
    case ConstraintKind::kNeutralization: return "neutralization";
    case ConstraintKind::kInitialState: return "initial-state";
  }
  return "unknown";
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (!field.empty()) {
    os << '(' << field << ')';
  }
  if (bs >= 0) {
    os << " BS" << (bs + 1);
  }
  os << " t=" << slot << " residual=" << residual;
  return os.str();
}

std::string FeasibilityReport::summary() const {
  if (violations.empty()) {
    return "feasible";
  }
  std::ostringstream os;
  os << violations.size() << " violation(s); first: " << violations.front().describe();
  return os.str();
}

StorageState step_state(const SystemParams& params, const StorageState& state,
                        const ControlAction& action, double tol) {
  StorageState next;
  for (std::size_t i = 0; i < 2; ++i) {
    if (action.c[i] < 0.0 || action.d[i] < 0.0) {
      throw BoundViolation("negative charge or discharge at BS " + std::to_string(i + 1));
    }
    if (action.d[i] > state[i] + tol) {
      throw DischargeExceedsStorage("BS " + std::to_string(i + 1) + " discharges " +
                                    std::to_string(action.d[i]) + " with only " +
                                    std::to_string(state[i]) + " stored");
    }
    next[i] = state[i] + params.alpha * action.c[i] - action.d[i];
    if (next[i] < -tol || next[i] > params.s_max + tol) {
      throw BoundViolation("BS " + std::to_string(i + 1) + " storage " +
                           std::to_string(next[i]) + " outside [0, s_max]");
    }
  }
  return next;
}

double neutralization_residual(const SystemParams& params, std::size_t bs, double e,
                               const ControlAction& a) {
  return e + a.w[bs] - a.c[bs] + params.alpha * a.d[bs] - a.sent_by(bs) +
         params.beta * a.received_by(bs);
}

FeasibilityReport check_feasible(const SystemParams& params, const NetEnergyProfile& profile,
                                 const Trajectory& traj, double tol) {
  const std::size_t n = traj.actions.size();
  if (profile.e1.size() != n || profile.e2.size() != n) {
    throw LengthMismatch("trajectory has " + std::to_string(n) + " slots, profile has " +
                         std::to_string(profile.e1.size()));
  }
  if (traj.states.size() != n + 1) {
    throw LengthMismatch("trajectory needs N+1 states");
  }

  FeasibilityReport report;
  auto flag = [&](ConstraintKind kind, int bs, std::size_t t, double residual,
                  std::string field = {}) {
    report.violations.push_back(Violation{kind, bs, t, residual, std::move(field)});
  };

  for (std::size_t i = 0; i < 2; ++i) {
    const double gap = traj.states[0][i] - params.s_init[i];
    if (std::abs(gap) > tol) {
      flag(ConstraintKind::kInitialState, static_cast<int>(i), 0, -std::abs(gap));
    }
  }

  for (std::size_t t = 0; t <= n; ++t) {
    for (std::size_t i = 0; i < 2; ++i) {
      const double s = traj.states[t][i];
      if (s < -tol) {
        flag(ConstraintKind::kStorageLower, static_cast<int>(i), t, s);
      }
      if (s > params.s_max + tol) {
        flag(ConstraintKind::kStorageUpper, static_cast<int>(i), t, params.s_max - s);
      }
    }
  }

  static const char* kFieldNames[2][3] = {{"w1", "c1", "d1"}, {"w2", "c2", "d2"}};
  for (std::size_t t = 0; t < n; ++t) {
    const ControlAction& a = traj.actions[t];
    for (std::size_t i = 0; i < 2; ++i) {
      const double vals[3] = {a.w[i], a.c[i], a.d[i]};
      for (std::size_t f = 0; f < 3; ++f) {
        if (vals[f] < -tol) {
          flag(ConstraintKind::kNonnegativity, static_cast<int>(i), t, vals[f], kFieldNames[i][f]);
        }
      }
    }
    if (a.x12 < -tol) {
      flag(ConstraintKind::kNonnegativity, -1, t, a.x12, "x12");
    }
    if (a.x21 < -tol) {
      flag(ConstraintKind::kNonnegativity, -1, t, a.x21, "x21");
    }

    for (std::size_t i = 0; i < 2; ++i) {
      const int bs = static_cast<int>(i);
      const double s = traj.states[t][i];
      if (a.d[i] > s + tol) {
        flag(ConstraintKind::kDischargeLimit, bs, t, s - a.d[i]);
      }
      const double expected = s + params.alpha * a.c[i] - a.d[i];
      const double gap = std::abs(traj.states[t + 1][i] - expected);
      if (gap > tol) {
        flag(ConstraintKind::kDynamics, bs, t, -gap);
      }
      const double r = neutralization_residual(params, i, profile.e(i)[t], a);
      if (r < -tol) {
        flag(ConstraintKind::kNeutralization, bs, t, r);
      }
    }
  }
  return report;
}

ControlAction normalize_action(const ControlAction& action, double alpha, double tol) {
  ControlAction a = action;
  auto snap = [tol](double& v) {
    if (v < 0.0 && v > -tol) {
      v = 0.0;
    }
  };
  for (std::size_t i = 0; i < 2; ++i) {
    snap(a.w[i]);
    snap(a.c[i]);
    snap(a.d[i]);
    if (alpha <= 0.0) {
      // Charging stores nothing; dropping it only frees energy.
      a.c[i] = 0.0;
      continue;
    }
    if (a.c[i] > 0.0 && a.d[i] > 0.0) {
      const double stored = alpha * a.c[i];
      if (stored <= a.d[i]) {
        a.d[i] -= stored;
        a.c[i] = 0.0;
      } else {
        a.c[i] -= a.d[i] / alpha;
        a.d[i] = 0.0;
      }
    }
  }
  snap(a.x12);
  snap(a.x21);
  if (a.x12 > 0.0 && a.x21 > 0.0) {
    if (a.x12 <= a.x21) {
      a.x21 -= a.x12;
      a.x12 = 0.0;
    } else {
      a.x12 -= a.x21;
      a.x21 = 0.0;
    }
  }
  return a;
}

double total_cost(const Trajectory& traj, std::size_t from_slot) {
  double sum = 0.0;
  for (std::size_t t = from_slot; t < traj.actions.size(); ++t) {
    sum += traj.actions[t].grid_total();
  }
  return sum;
}

double max_complementarity_product(const Trajectory& traj) {
  double worst = 0.0;
  for (const ControlAction& a : traj.actions) {
    worst = std::max({worst, a.c[0] * a.d[0], a.c[1] * a.d[1], a.x12 * a.x21});
  }
  return worst;
}

}  // namespace ecoop
