// SPDX-License-Identifier: Apache-2.0
// Shared generators and independent oracles for the test binaries.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ecoop/lp.hpp"
#include "ecoop/model.hpp"

namespace ecoop::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  /// Uniform on (lo, hi]: never returns lo.
  double open_closed(double lo, double hi) { return hi - (hi - lo) * uniform(0.0, 1.0); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(gen_);
  }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

 private:
  std::mt19937_64 gen_;
};

/// alpha, beta in (0, 1], s_max in [0.5, 3], zero initial storage.
SystemParams random_params(Rng& rng, std::size_t n_slots);

/// Net energies uniform in [lo, hi].
std::vector<double> random_series(Rng& rng, std::size_t n, double lo = -3.0, double hi = 3.0);
NetEnergyProfile random_profile(Rng& rng, std::size_t n, double lo = -3.0, double hi = 3.0);

/// Small LP with box bounds and up to six variables. Rows pass through
/// a random interior point, except for occasional shifted ones that
/// usually make the program infeasible.
LpProblem random_program(Rng& rng);

struct VertexOracleResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
};

/// Minimizes over every basic solution of a small LP with finite bounds:
/// each choice of n active constraints (rows or bounds) that pins a
/// unique point is solved directly and kept if feasible.
VertexOracleResult vertex_enumeration(const LpProblem& problem, double tol = 1e-9);

/// Exhaustive search for the 2-slot, 2-BS horizon problem with zero initial
/// storage. Storage levels after each slot range over a grid of `step`, and
/// the signed transfer z (z > 0 sends from BS 1) ranges over [-z_max, z_max]
/// on the same step. Returns the least total grid draw found.
double brute_force_two_slot(const SystemParams& params, const NetEnergyProfile& profile,
                            double step = 0.01, double z_max = 3.0);

/// Exhaustive search for one isolated BS with zero initial storage over a
/// storage grid of `step`.
double brute_force_single(const SystemParams& params, const std::vector<double>& e,
                          double step = 0.01);

}  // namespace ecoop::testing
