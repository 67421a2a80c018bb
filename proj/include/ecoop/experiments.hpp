// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ecoop/model.hpp"

namespace ecoop {

inline constexpr const char* kVersion = "1.0.0";

/// Env var capping the worker pool size.
inline constexpr const char* kThreadsEnv = "ECOOP_THREADS";

struct ExperimentSpec {
  std::string id;  ///< cost-vs-storage | saving-vs-theta | greedy-loss-vs-theta | hybrid-vs-greedy
  std::vector<double> thetas;
  std::vector<double> s_max_list;
  SystemParams params;  ///< s_max is taken from s_max_list
  double amplitude = 3.0;
  double omega = 0.0;
  double noise_scale = 0.0;
  std::vector<std::uint64_t> seeds;
  /// 0 picks hardware concurrency (capped by the env var); 1 runs inline.
  std::size_t threads = 0;

  /// Throws ValidationError for unknown ids or empty grids.
  void validate() const;
};

/// Default grids and constants for each study.
ExperimentSpec default_spec(const std::string& id);
const std::vector<std::string>& experiment_ids();

/// Tallies check_feasible over every trajectory a run produces.
struct FeasibilityAudit {
  std::size_t checked = 0;
  std::size_t infeasible = 0;
  double max_complementarity = 0.0;         ///< over normalized planners
  double max_complementarity_hybrid = 0.0;  ///< superposed actions, informational
  std::vector<std::string> failures;

  void add(const SystemParams& params, const NetEnergyProfile& profile, const Trajectory& traj,
           bool normalized, const std::string& tag);
  void merge(const FeasibilityAudit& other);
};

struct ResultRow {
  double theta = 0.0;
  double s_max = 0.0;
  std::string metric;
  double value = 0.0;
};

struct ExperimentResult {
  std::string id;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ResultRow> rows;
  FeasibilityAudit audit;

  /// Throws ValidationError when the row is absent.
  double value(double theta, double s_max, const std::string& metric) const;
  std::vector<double> column(const std::string& metric) const;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

ExperimentResult exp_cost_vs_storage(const ExperimentSpec& spec);
ExperimentResult exp_saving_vs_theta(const ExperimentSpec& spec);
ExperimentResult exp_greedy_loss_vs_theta(const ExperimentSpec& spec);
ExperimentResult exp_hybrid_vs_greedy(const ExperimentSpec& spec);

/// `#key=value` metadata lines, then `theta,smax,metric,value`.
void write_result(const ExperimentResult& result, std::ostream& out);
void save_result(const ExperimentResult& result, const std::string& path);

/// Resolved worker count for a spec (env var applied).
std::size_t worker_count(std::size_t requested);

/// Runs fn(0..n-1) on a pool; the first exception is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace ecoop
