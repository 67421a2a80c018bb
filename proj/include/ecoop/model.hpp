// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace ecoop {

/// Per-base-station pair; index 0 is BS 1, index 1 is BS 2.
using PerBs = std::array<double, 2>;

/// Absolute tolerance applied to every constraint residual of an emitted
/// trajectory.
inline constexpr double kFeasibilityTol = 1e-6;

struct StorageState {
  PerBs s{0.0, 0.0};

  double operator[](std::size_t i) const { return s[i]; }
  double& operator[](std::size_t i) { return s[i]; }
  double total() const { return s[0] + s[1]; }
};

struct SystemParams {
  double alpha = 0.9;  ///< storage efficiency
  double beta = 0.8;   ///< power-line transfer efficiency
  double s_max = 1.0;  ///< per-BS storage capacity
  std::size_t n_slots = 1;
  StorageState s_init{};

  /// Throws ValidationError when any invariant fails.
  void validate() const;
};

/// Net energy E_i(t) = RE_i(t) - DE_i(t) per slot. The renewable/demand
/// series are optional; when present they are the source of e1/e2.
struct NetEnergyProfile {
  std::vector<double> e1;
  std::vector<double> e2;
  std::vector<double> re1, de1, re2, de2;

  static NetEnergyProfile from_net(std::vector<double> e1, std::vector<double> e2);
  static NetEnergyProfile from_components(std::vector<double> re1, std::vector<double> de1,
                                          std::vector<double> re2, std::vector<double> de2);

  std::size_t size() const { return e1.size(); }
  bool has_components() const { return !re1.empty(); }
  const std::vector<double>& e(std::size_t i) const { return i == 0 ? e1 : e2; }
  std::vector<double>& e(std::size_t i) { return i == 0 ? e1 : e2; }

  /// Throws LengthMismatch / ValidationError.
  void validate(std::size_t n_slots) const;
};

/// One slot of decisions. All fields are energies drawn, stored or sent
/// during the slot and must be nonnegative.
struct ControlAction {
  PerBs w{0.0, 0.0};  ///< grid draw
  PerBs c{0.0, 0.0};  ///< storage charge
  PerBs d{0.0, 0.0};  ///< storage discharge
  double x12 = 0.0;   ///< sent from BS 1 to BS 2
  double x21 = 0.0;   ///< sent from BS 2 to BS 1

  double sent_by(std::size_t i) const { return i == 0 ? x12 : x21; }
  double& sent_by(std::size_t i) { return i == 0 ? x12 : x21; }
  double received_by(std::size_t i) const { return i == 0 ? x21 : x12; }
  double grid_total() const { return w[0] + w[1]; }
};

ControlAction operator+(const ControlAction& a, const ControlAction& b);

struct Trajectory {
  std::vector<ControlAction> actions;  ///< N entries
  std::vector<StorageState> states;    ///< N+1 entries, states[0] = s_init

  std::size_t size() const { return actions.size(); }
  double total_cost() const;
};

enum class ConstraintKind {
  kNonnegativity,
  kDischargeLimit,
  kDynamics,
  kStorageLower,
  kStorageUpper,
  kNeutralization,
  kInitialState,
};

std::string to_string(ConstraintKind kind);

struct Violation {
  ConstraintKind kind;
  int bs;            ///< 0 or 1; -1 when the constraint is not per-BS
  std::size_t slot;  ///< 0-based slot (state index for storage bounds)
  double residual;   ///< negative amount by which the constraint fails
  std::string field; ///< offending field for nonnegativity violations

  std::string describe() const;
};

struct FeasibilityReport {
  std::vector<Violation> violations;

  bool empty() const { return violations.empty(); }
  std::string summary() const;
};

/// s_i' = s_i + alpha*c_i - d_i.
StorageState step_state(const SystemParams& params, const StorageState& state,
                        const ControlAction& action, double tol = kFeasibilityTol);

/// E_i + w_i - c_i + alpha*d_i - x_out + beta*x_in. Nonnegative when BS i
/// is energy neutral in the slot.
double neutralization_residual(const SystemParams& params, std::size_t bs, double e,
                               const ControlAction& action);

FeasibilityReport check_feasible(const SystemParams& params, const NetEnergyProfile& profile,
                                 const Trajectory& traj, double tol = kFeasibilityTol);

/// Cancels simultaneous charge/discharge and two-way transfer while keeping
/// the net storage change of each BS and the grid draws unchanged.
/// Neutralization slack never decreases.
ControlAction normalize_action(const ControlAction& action, double alpha, double tol = 1e-12);

/// Sum of grid draws over slots [from_slot, N).
double total_cost(const Trajectory& traj, std::size_t from_slot = 0);

/// Largest c_i*d_i and x12*x21 product over all slots.
double max_complementarity_product(const Trajectory& traj);

}  // namespace ecoop
