// SPDX-License-Identifier: Apache-2.0
#include "ecoop/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <type_traits>

#include "ecoop/errors.hpp"
#include "ecoop/greedy.hpp"
#include "ecoop/hybrid.hpp"
#include "ecoop/offline.hpp"
#include "ecoop/profiles.hpp"

namespace ecoop {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) os << ';';
    if constexpr (std::is_floating_point_v<T>) {
      os << fmt(v[k]);
    } else {
      os << v[k];
    }
  }
  return os.str();
}

std::vector<double> theta_grid() {
  std::vector<double> out;
  for (int k = 0; k <= 16; ++k) out.push_back(k * kPi / 8.0);
  return out;
}

double loss_pct(double cost, double reference) {
  if (reference <= 1e-12) {
    return cost <= 1e-9 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return 100.0 * (cost - reference) / reference;
}

SystemParams params_at(const ExperimentSpec& spec, double s_max) {
  SystemParams p = spec.params;
  p.s_max = s_max;
  p.s_init = StorageState{};
  return p;
}

NetEnergyProfile profile_at(const ExperimentSpec& spec, double theta) {
  return sinusoid(spec.amplitude, spec.omega, theta, spec.params.n_slots, 0);
}

ExperimentResult start_result(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult r;
  r.id = spec.id;
  r.metadata = {
      {"experiment", spec.id},
      {"version", kVersion},
      {"alpha", fmt(spec.params.alpha)},
      {"beta", fmt(spec.params.beta)},
      {"s_max", join(spec.s_max_list)},
      {"n_slots", std::to_string(spec.params.n_slots)},
      {"amplitude", fmt(spec.amplitude)},
      {"omega", fmt(spec.omega)},
      {"theta", join(spec.thetas)},
      {"gamma", fmt(0.5 * spec.params.alpha * spec.params.beta)},
      {"eps_lex", "1e-7*max(1,v1)"},
      {"case_tol", fmt(kSignTol)},
      {"noise_scale", fmt(spec.noise_scale)},
      {"seeds", join(spec.seeds)},
      {"prng", "mt19937_64+inverse-cdf"},
  };
  return r;
}

void finish_result(ExperimentResult& r) {
  r.metadata.emplace_back("trajectories_checked", std::to_string(r.audit.checked));
  r.metadata.emplace_back("infeasible", std::to_string(r.audit.infeasible));
  r.metadata.emplace_back("max_complementarity", fmt(r.audit.max_complementarity));
}

struct Cell {
  std::vector<ResultRow> rows;
  FeasibilityAudit audit;
};

void collect(ExperimentResult& r, std::vector<Cell>& cells) {
  for (Cell& c : cells) {
    r.rows.insert(r.rows.end(), c.rows.begin(), c.rows.end());
    r.audit.merge(c.audit);
  }
}

/// Single-BS baseline per storage size, indexed like spec.s_max_list.
std::vector<Cell> single_bs_cells(const ExperimentSpec& spec, std::vector<double>& costs) {
  std::vector<Cell> cells(spec.s_max_list.size());
  costs.assign(spec.s_max_list.size(), 0.0);
  const NetEnergyProfile base = profile_at(spec, 0.0);
  parallel_for(cells.size(), worker_count(spec.threads), [&](std::size_t k) {
    const SystemParams p = params_at(spec, spec.s_max_list[k]);
    const Trajectory traj = plan_single_bs(p, base.e1);
    const NetEnergyProfile solo =
        NetEnergyProfile::from_net(base.e1, std::vector<double>(base.size(), 0.0));
    cells[k].audit.add(p, solo, traj, true, "single s_max=" + fmt(p.s_max));
    costs[k] = traj.total_cost();
  });
  return cells;
}

}  // namespace

void ExperimentSpec::validate() const {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    throw ValidationError("unknown experiment '" + id + "'");
  }
  if (thetas.empty() || s_max_list.empty()) {
    throw ValidationError("experiment grids must be non-empty");
  }
  if (id == "hybrid-vs-greedy" && seeds.empty()) {
    throw ValidationError("hybrid-vs-greedy needs at least one seed");
  }
  for (double s : s_max_list) {
    SystemParams p = params;
    p.s_max = s;
    p.s_init = StorageState{};
    p.validate();
  }
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"cost-vs-storage", "saving-vs-theta",
                                            "greedy-loss-vs-theta", "hybrid-vs-greedy"};
  return ids;
}

ExperimentSpec default_spec(const std::string& id) {
  ExperimentSpec s;
  s.id = id;
  s.params.alpha = 0.9;
  s.params.beta = 0.8;
  s.params.n_slots = 240;
  s.amplitude = 3.0;
  s.omega = 2.0 * kPi / 24.0;
  s.s_max_list = {0.25, 0.5, 1.0, 2.0, 3.0, 4.0};
  s.thetas = theta_grid();
  if (id == "cost-vs-storage") {
    s.thetas = {kPi / 4.0, kPi / 2.0, 3.0 * kPi / 4.0, kPi};
  } else if (id == "saving-vs-theta" || id == "greedy-loss-vs-theta") {
    s.s_max_list = {1.0};
  } else if (id == "hybrid-vs-greedy") {
    s.amplitude = 5.0;
    s.s_max_list = {3.5};
    s.noise_scale = 0.125;
    for (std::uint64_t k = 1; k <= 20; ++k) s.seeds.push_back(k);
  }
  s.params.s_max = s.s_max_list.front();
  s.validate();
  return s;
}

void FeasibilityAudit::add(const SystemParams& params, const NetEnergyProfile& profile,
                           const Trajectory& traj, bool normalized, const std::string& tag) {
  ++checked;
  const FeasibilityReport rep = check_feasible(params, profile, traj, kFeasibilityTol);
  if (!rep.empty()) {
    ++infeasible;
    failures.push_back(tag + ": " + rep.summary());
  }
  const double comp = max_complementarity_product(traj);
  if (normalized) {
    max_complementarity = std::max(max_complementarity, comp);
  } else {
    max_complementarity_hybrid = std::max(max_complementarity_hybrid, comp);
  }
}

void FeasibilityAudit::merge(const FeasibilityAudit& o) {
  checked += o.checked;
  infeasible += o.infeasible;
  max_complementarity = std::max(max_complementarity, o.max_complementarity);
  max_complementarity_hybrid = std::max(max_complementarity_hybrid, o.max_complementarity_hybrid);
  failures.insert(failures.end(), o.failures.begin(), o.failures.end());
}

double ExperimentResult::value(double theta, double s_max, const std::string& metric) const {
  for (const ResultRow& r : rows) {
    if (r.metric == metric && std::abs(r.theta - theta) <= 1e-12 &&
        std::abs(r.s_max - s_max) <= 1e-12) {
      return r.value;
    }
  }
  throw ValidationError("no row for metric " + metric + " at theta=" + fmt(theta) +
                        " s_max=" + fmt(s_max));
}

std::vector<double> ExperimentResult::column(const std::string& metric) const {
  std::vector<double> out;
  for (const ResultRow& r : rows) {
    if (r.metric == metric) out.push_back(r.value);
  }
  return out;
}

ExperimentResult exp_cost_vs_storage(const ExperimentSpec& spec) {
  ExperimentResult r = start_result(spec);
  std::vector<double> single;
  std::vector<Cell> baseline = single_bs_cells(spec, single);

  const std::size_t ns = spec.s_max_list.size();
  std::vector<Cell> cells(spec.thetas.size() * ns);
  parallel_for(cells.size(), worker_count(spec.threads), [&](std::size_t idx) {
    const double theta = spec.thetas[idx / ns];
    const double smax = spec.s_max_list[idx % ns];
    const SystemParams p = params_at(spec, smax);
    const NetEnergyProfile prof = profile_at(spec, theta);
    const Trajectory traj = plan_offline_min_cost(p, prof);
    cells[idx].audit.add(p, prof, traj, true, "offline theta=" + fmt(theta));
    cells[idx].rows.push_back({theta, smax, "pair_cost_per_bs", traj.total_cost() / 2.0});
    cells[idx].rows.push_back({theta, smax, "single_bs_cost", single[idx % ns]});
  });
  collect(r, baseline);
  collect(r, cells);
  finish_result(r);
  return r;
}

ExperimentResult exp_saving_vs_theta(const ExperimentSpec& spec) {
  ExperimentResult r = start_result(spec);
  std::vector<double> single;
  std::vector<Cell> baseline = single_bs_cells(spec, single);

  const std::size_t ns = spec.s_max_list.size();
  std::vector<Cell> cells(spec.thetas.size() * ns);
  parallel_for(cells.size(), worker_count(spec.threads), [&](std::size_t idx) {
    const double theta = spec.thetas[idx / ns];
    const double smax = spec.s_max_list[idx % ns];
    const SystemParams p = params_at(spec, smax);
    const NetEnergyProfile prof = profile_at(spec, theta);
    const Trajectory traj = plan_offline_min_cost(p, prof);
    cells[idx].audit.add(p, prof, traj, true, "offline theta=" + fmt(theta));
    const double pair = traj.total_cost() / 2.0;
    const double solo = single[idx % ns];
    const double saving = solo > 0.0 ? 100.0 * (solo - pair) / solo : 0.0;
    cells[idx].rows.push_back({theta, smax, "pair_cost_per_bs", pair});
    cells[idx].rows.push_back({theta, smax, "single_bs_cost", solo});
    cells[idx].rows.push_back({theta, smax, "saving_pct", saving});
  });
  collect(r, baseline);
  collect(r, cells);
  finish_result(r);
  return r;
}

ExperimentResult exp_greedy_loss_vs_theta(const ExperimentSpec& spec) {
  ExperimentResult r = start_result(spec);
  const std::size_t ns = spec.s_max_list.size();
  std::vector<Cell> cells(spec.thetas.size() * ns);
  parallel_for(cells.size(), worker_count(spec.threads), [&](std::size_t idx) {
    const double theta = spec.thetas[idx / ns];
    const double smax = spec.s_max_list[idx % ns];
    const SystemParams p = params_at(spec, smax);
    const NetEnergyProfile prof = profile_at(spec, theta);
    const Trajectory offline = plan_offline_min_cost(p, prof);
    const Trajectory greedy = run_greedy(p, prof, GreedyMode::kStandard);
    cells[idx].audit.add(p, prof, offline, true, "offline theta=" + fmt(theta));
    cells[idx].audit.add(p, prof, greedy, true, "greedy theta=" + fmt(theta));
    const double c_off = offline.total_cost();
    const double c_gr = greedy.total_cost();
    cells[idx].rows.push_back({theta, smax, "offline_cost", c_off});
    cells[idx].rows.push_back({theta, smax, "greedy_cost", c_gr});
    cells[idx].rows.push_back({theta, smax, "greedy_loss_pct", loss_pct(c_gr, c_off)});
  });
  collect(r, cells);
  finish_result(r);
  return r;
}

ExperimentResult exp_hybrid_vs_greedy(const ExperimentSpec& spec) {
  ExperimentResult r = start_result(spec);
  const std::size_t ns = spec.s_max_list.size();
  const std::size_t nseeds = spec.seeds.size();
  const std::size_t npoints = spec.thetas.size() * ns;

  // The plan on the known component depends only on the grid point.
  std::vector<Trajectory> plans(npoints);
  std::vector<Cell> plan_cells(npoints);
  parallel_for(npoints, worker_count(spec.threads), [&](std::size_t idx) {
    const SystemParams p = params_at(spec, spec.s_max_list[idx % ns]);
    const NetEnergyProfile det = profile_at(spec, spec.thetas[idx / ns]);
    plans[idx] = plan_offline(p, det);
    plan_cells[idx].audit.add(p, det, plans[idx], true, "plan theta=" + fmt(spec.thetas[idx / ns]));
  });

  std::vector<double> greedy_loss(npoints * nseeds), hybrid_loss(npoints * nseeds);
  std::vector<Cell> runs(npoints * nseeds);
  parallel_for(runs.size(), worker_count(spec.threads), [&](std::size_t k) {
    const std::size_t idx = k / nseeds;
    const double theta = spec.thetas[idx / ns];
    const SystemParams p = params_at(spec, spec.s_max_list[idx % ns]);
    const NetEnergyProfile det = profile_at(spec, theta);
    const NetEnergyProfile real = add_gaussian_noise(det, spec.noise_scale, spec.seeds[k % nseeds]);
    const std::string tag = " theta=" + fmt(theta) + " seed=" + std::to_string(spec.seeds[k % nseeds]);

    const Trajectory reference = plan_offline_min_cost(p, real);
    const Trajectory greedy = run_greedy(p, real, GreedyMode::kStandard);
    HybridController ctl(p, plans[idx]);
    for (std::size_t t = 0; t < p.n_slots; ++t) ctl.step(real.e1[t], real.e2[t]);

    runs[k].audit.add(p, real, reference, true, "offline" + tag);
    runs[k].audit.add(p, real, greedy, true, "greedy" + tag);
    runs[k].audit.add(p, real, ctl.combined(), false, "hybrid" + tag);
    const double ref = reference.total_cost();
    greedy_loss[k] = loss_pct(greedy.total_cost(), ref);
    hybrid_loss[k] = loss_pct(ctl.combined().total_cost(), ref);
  });

  auto stats = [&](const std::vector<double>& v, std::size_t idx) {
    double mean = 0.0;
    for (std::size_t s = 0; s < nseeds; ++s) mean += v[idx * nseeds + s];
    mean /= static_cast<double>(nseeds);
    double var = 0.0;
    for (std::size_t s = 0; s < nseeds; ++s) {
      const double dev = v[idx * nseeds + s] - mean;
      var += dev * dev;
    }
    const double se =
        nseeds > 1 ? std::sqrt(var / static_cast<double>(nseeds - 1) / static_cast<double>(nseeds))
                   : 0.0;
    return std::pair<double, double>{mean, se};
  };

  collect(r, plan_cells);
  for (std::size_t idx = 0; idx < npoints; ++idx) {
    const double theta = spec.thetas[idx / ns];
    const double smax = spec.s_max_list[idx % ns];
    const auto [gm, gse] = stats(greedy_loss, idx);
    const auto [hm, hse] = stats(hybrid_loss, idx);
    r.rows.push_back({theta, smax, "greedy_loss_mean", gm});
    r.rows.push_back({theta, smax, "greedy_loss_se", gse});
    r.rows.push_back({theta, smax, "hybrid_loss_mean", hm});
    r.rows.push_back({theta, smax, "hybrid_loss_se", hse});
  }
  for (Cell& c : runs) r.audit.merge(c.audit);
  finish_result(r);
  return r;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.id == "cost-vs-storage") return exp_cost_vs_storage(spec);
  if (spec.id == "saving-vs-theta") return exp_saving_vs_theta(spec);
  if (spec.id == "greedy-loss-vs-theta") return exp_greedy_loss_vs_theta(spec);
  return exp_hybrid_vs_greedy(spec);
}

void write_result(const ExperimentResult& result, std::ostream& out) {
  for (const auto& [k, v] : result.metadata) out << '#' << k << '=' << v << '\n';
  out << "theta,smax,metric,value\n";
  for (const ResultRow& r : result.rows) {
    out << fmt(r.theta) << ',' << fmt(r.s_max) << ',' << r.metric << ',' << fmt(r.value) << '\n';
  }
}

void save_result(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write results to '" + path + "'");
  }
  write_result(result, out);
}

std::size_t worker_count(std::size_t requested) {
  std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<std::size_t>(n, cap);
  }
  return n;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t k = next.fetch_add(1);
        if (k >= n) return;
        try {
          fn(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ecoop
