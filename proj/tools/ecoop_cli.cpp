// SPDX-License-Identifier: Apache-2.0
// ecoop: offline / greedy / hybrid planners and the simulation studies.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecoop/errors.hpp"
#include "ecoop/experiments.hpp"
#include "ecoop/greedy.hpp"
#include "ecoop/hybrid.hpp"
#include "ecoop/offline.hpp"
#include "ecoop/profiles.hpp"
#include "ecoop/trajectory_io.hpp"

namespace {

using namespace ecoop;

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct Common {
  double alpha = 0.9;
  double beta = 0.8;
  double s_max = 1.0;
  std::optional<std::size_t> n;
  std::uint64_t seed = 1;
  std::string profile;
  std::string out;
  std::optional<double> gamma;
  double theta = std::numbers::pi / 2.0;
  double amplitude = 3.0;
  double omega = 2.0 * std::numbers::pi / 24.0;
  double s1 = 0.0;
  double s2 = 0.0;
  bool debug = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--alpha", c.alpha, "storage efficiency")->capture_default_str();
  cmd->add_option("--beta", c.beta, "transfer efficiency")->capture_default_str();
  cmd->add_option("--smax", c.s_max, "storage capacity per BS")->capture_default_str();
  cmd->add_option("--n", c.n, "horizon in slots (default: profile length or 240)");
  cmd->add_option("--seed", c.seed, "noise seed")->capture_default_str();
  cmd->add_option("--profile", c.profile, "profile CSV (t,E1,E2 or t,RE1,DE1,RE2,DE2)");
  cmd->add_option("--out", c.out, "output CSV (default: stdout)");
  cmd->add_option("--gamma", c.gamma, "storage weight of the one-step LP, in (0, alpha*beta)");
  cmd->add_option("--theta", c.theta, "phase shift of the built-in sinusoid")->capture_default_str();
  cmd->add_option("--amplitude", c.amplitude, "amplitude of the built-in sinusoid")
      ->capture_default_str();
  cmd->add_option("--omega", c.omega, "angular frequency per slot")->capture_default_str();
  cmd->add_option("--s1", c.s1, "initial storage at BS 1")->capture_default_str();
  cmd->add_option("--s2", c.s2, "initial storage at BS 2")->capture_default_str();
  cmd->add_flag("--debug", c.debug, "extra columns / component files");
}

NetEnergyProfile input_profile(const Common& c, const std::string& path) {
  if (!path.empty()) {
    NetEnergyProfile p = load_profile(path);
    if (c.n && *c.n != p.size()) {
      throw LengthMismatch("--n " + std::to_string(*c.n) + " but profile has " +
                           std::to_string(p.size()) + " rows");
    }
    return p;
  }
  return sinusoid(c.amplitude, c.omega, c.theta, c.n.value_or(240), 0);
}

SystemParams make_params(const Common& c, std::size_t n) {
  SystemParams p;
  p.alpha = c.alpha;
  p.beta = c.beta;
  p.s_max = c.s_max;
  p.n_slots = n;
  p.s_init[0] = c.s1;
  p.s_init[1] = c.s2;
  p.validate();
  return p;
}

void emit(const Common& c, const NetEnergyProfile& prof, const Trajectory& traj,
          const std::vector<std::string>* cases) {
  if (c.out.empty()) {
    write_trajectory(std::cout, prof, traj, cases);
  } else {
    save_trajectory(c.out, prof, traj, cases);
  }
}

void report(const SystemParams& params, const NetEnergyProfile& prof, const Trajectory& traj) {
  const FeasibilityReport rep = check_feasible(params, prof, traj);
  std::fprintf(stderr, "total_cost=%.9g  %s\n", traj.total_cost(), rep.summary().c_str());
}

std::string sibling(const std::string& out, const std::string& suffix) {
  const auto dot = out.rfind(".csv");
  const std::string stem = dot == std::string::npos ? out : out.substr(0, dot);
  return stem + "." + suffix + ".csv";
}

int run(int argc, char** argv) {
  CLI::App app{"Energy cooperation planners for two base stations"};
  app.require_subcommand(1);

  Common common;
  std::string mode_name = "standard";
  std::string realized_path;
  double noise = 0.125;
  std::string exp_id;
  std::vector<double> exp_smax, exp_theta;
  std::optional<std::size_t> exp_seeds;
  std::size_t threads = 0;
  bool single_thread = false;

  CLI::App* offline = app.add_subcommand("offline", "two-pass offline plan");
  add_common(offline, common);

  CLI::App* greedy = app.add_subcommand("greedy", "online greedy rollout");
  add_common(greedy, common);
  greedy->add_option("--mode", mode_name, "standard | force_case_2a | no_storage | no_transfer")
      ->capture_default_str();

  CLI::App* hybrid = app.add_subcommand("hybrid", "offline plan on the known part + greedy");
  add_common(hybrid, common);
  hybrid->add_option("--realized", realized_path, "realized profile CSV");
  hybrid->add_option("--noise", noise, "noise scale when --realized is absent")
      ->capture_default_str();

  CLI::App* experiment = app.add_subcommand("experiment", "run a simulation study");
  experiment->add_option("id", exp_id, "cost-vs-storage | saving-vs-theta | "
                                       "greedy-loss-vs-theta | hybrid-vs-greedy")
      ->required();
  experiment->add_option("--out", common.out, "output CSV (default: stdout)");
  experiment->add_option("--alpha", common.alpha)->capture_default_str();
  experiment->add_option("--beta", common.beta)->capture_default_str();
  experiment->add_option("--n", common.n, "horizon in slots");
  experiment->add_option("--smax", exp_smax, "storage grid");
  experiment->add_option("--theta", exp_theta, "phase-shift grid");
  experiment->add_option("--seeds", exp_seeds, "use seeds 1..K");
  experiment->add_option("--seed", common.seed, "first seed")->capture_default_str();
  experiment->add_option("--threads", threads, "worker threads (0 = auto)");
  experiment->add_flag("--single-thread", single_thread, "run grid points inline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (*offline) {
    const NetEnergyProfile prof = input_profile(common, common.profile);
    const SystemParams p = make_params(common, prof.size());
    const Trajectory traj = plan_offline(p, prof);
    emit(common, prof, traj, nullptr);
    report(p, prof, traj);
  } else if (*greedy) {
    const NetEnergyProfile prof = input_profile(common, common.profile);
    const SystemParams p = make_params(common, prof.size());
    Trajectory traj;
    std::vector<std::string> cases;
    if (common.gamma) {
      // One-step LP per slot instead of the closed form.
      traj.states.push_back(p.s_init);
      for (std::size_t t = 0; t < p.n_slots; ++t) {
        GreedyStep s = greedy_step_lp(p, traj.states.back(), prof.e1[t], prof.e2[t], *common.gamma);
        traj.actions.push_back(s.action);
        traj.states.push_back(s.next);
        cases.push_back(s.case_label);
      }
    } else {
      GreedyRun r = run_greedy_detailed(p, prof, parse_greedy_mode(mode_name));
      traj = std::move(r.trajectory);
      cases = std::move(r.cases);
    }
    emit(common, prof, traj, common.debug ? &cases : nullptr);
    report(p, prof, traj);
  } else if (*hybrid) {
    DecomposedProfile dp;
    dp.deterministic = input_profile(common, common.profile);
    dp.realized = realized_path.empty()
                      ? add_gaussian_noise(dp.deterministic, noise, common.seed)
                      : load_profile(realized_path);
    const SystemParams p = make_params(common, dp.deterministic.size());
    const HybridRun r = run_hybrid_detailed(p, dp);
    emit(common, dp.realized, r.combined, common.debug ? &r.cases : nullptr);
    if (common.debug && !common.out.empty()) {
      save_trajectory(sibling(common.out, "offline"), dp.deterministic, r.offline);
      save_trajectory(sibling(common.out, "online"), r.residual, r.online, &r.cases);
    }
    report(p, dp.realized, r.combined);
  } else if (*experiment) {
    ExperimentSpec spec = default_spec(exp_id);
    spec.params.alpha = common.alpha;
    spec.params.beta = common.beta;
    if (common.n) spec.params.n_slots = *common.n;
    if (!exp_smax.empty()) spec.s_max_list = exp_smax;
    if (!exp_theta.empty()) spec.thetas = exp_theta;
    if (exp_seeds) {
      spec.seeds.clear();
      for (std::size_t k = 0; k < *exp_seeds; ++k) spec.seeds.push_back(common.seed + k);
    } else if (!spec.seeds.empty() && common.seed != 1) {
      for (std::size_t k = 0; k < spec.seeds.size(); ++k) spec.seeds[k] = common.seed + k;
    }
    spec.threads = single_thread ? 1 : threads;
    const ExperimentResult res = run_experiment(spec);
    if (common.out.empty()) {
      write_result(res, std::cout);
    } else {
      save_result(res, common.out);
    }
    std::fprintf(stderr, "%zu trajectories checked, %zu infeasible\n", res.audit.checked,
                 res.audit.infeasible);
    for (const std::string& f : res.audit.failures) std::fprintf(stderr, "  %s\n", f.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ecoop::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const ecoop::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
