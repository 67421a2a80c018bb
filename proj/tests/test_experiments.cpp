// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ecoop/errors.hpp"
#include "ecoop/experiments.hpp"

using namespace ecoop;

namespace {

constexpr double kPi = std::numbers::pi;

std::string csv(const ExperimentResult& r) {
  std::ostringstream os;
  write_result(r, os);
  return os.str();
}

std::map<std::string, std::string> metadata(const ExperimentResult& r) {
  return {r.metadata.begin(), r.metadata.end()};
}

}  // namespace

TEST_CASE("default specs") {
  for (const std::string& id : experiment_ids()) {
    const ExperimentSpec s = default_spec(id);
    CHECK(s.params.alpha == 0.9);
    CHECK(s.params.beta == 0.8);
    CHECK(s.params.n_slots == 240);
    CHECK_NOTHROW(s.validate());
  }
  CHECK(default_spec("saving-vs-theta").thetas.size() == 17);
  CHECK(default_spec("cost-vs-storage").s_max_list.size() == 6);
  CHECK(default_spec("hybrid-vs-greedy").seeds.size() == 20);
  CHECK(default_spec("hybrid-vs-greedy").amplitude == 5.0);

  ExperimentSpec bad = default_spec("saving-vs-theta");
  bad.id = "nope";
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = default_spec("saving-vs-theta");
  bad.thetas.clear();
  CHECK_THROWS_AS(run_experiment(bad), ValidationError);
  bad = default_spec("hybrid-vs-greedy");
  bad.seeds.clear();
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("storage sweep orders the phase shifts") {
  const ExperimentResult r = run_experiment(default_spec("cost-vs-storage"));
  const ExperimentSpec spec = default_spec("cost-vs-storage");
  for (double smax : spec.s_max_list) {
    const double at_pi = r.value(kPi, smax, "pair_cost_per_bs");
    const double single = r.value(kPi, smax, "single_bs_cost");
    for (double theta : spec.thetas) {
      CHECK(at_pi <= r.value(theta, smax, "pair_cost_per_bs") + 1e-9);
      CHECK(r.value(theta, smax, "pair_cost_per_bs") <= single + 1e-9);
    }
  }
  const double flat = r.value(kPi, 0.25, "pair_cost_per_bs") - r.value(kPi, 4.0, "pair_cost_per_bs");
  CHECK(flat <= 0.05 * r.value(kPi, 0.25, "single_bs_cost"));
  CHECK(r.rows.size() == 4 * 6 * 2);
  CHECK(r.audit.infeasible == 0);
}

TEST_CASE("saving sweep") {
  const ExperimentResult r = run_experiment(default_spec("saving-vs-theta"));
  const std::vector<double> s = r.column("saving_pct");
  REQUIRE(s.size() == 17);
  CHECK(std::max_element(s.begin(), s.end()) - s.begin() == 8);
  for (double v : s) CHECK(v >= -1e-9);
  // Mirror phases give nearly equal savings; the discrete start at t = 0
  // breaks exact symmetry.
  for (std::size_t k = 0; k <= 8; ++k) CHECK(std::abs(s[k] - s[16 - k]) <= 0.05);
  CHECK(std::abs(s[0] - s[16]) <= 1e-9);
}

TEST_CASE("greedy loss sweep") {
  ExperimentSpec spec = default_spec("greedy-loss-vs-theta");
  const ExperimentResult r = run_experiment(spec);
  const std::vector<double> loss = r.column("greedy_loss_pct");
  REQUIRE(loss.size() == 17);
  for (double v : loss) {
    CHECK(v >= -1e-6);
    CHECK(v <= 3.0);
  }
  CHECK(r.value(kPi, 1.0, "greedy_loss_pct") <= r.value(kPi / 2, 1.0, "greedy_loss_pct"));
  CHECK(r.audit.checked == 34);
  CHECK(r.audit.infeasible == 0);
}

TEST_CASE("reruns and thread counts give identical bytes") {
  ExperimentSpec spec = default_spec("greedy-loss-vs-theta");
  spec.params.n_slots = 48;
  spec.thetas = {0.0, kPi / 2, kPi};
  spec.s_max_list = {0.5, 1.0};
  spec.threads = 1;
  const std::string a = csv(run_experiment(spec));
  CHECK(a == csv(run_experiment(spec)));
  spec.threads = 3;
  CHECK(a == csv(run_experiment(spec)));

  ExperimentSpec h = default_spec("hybrid-vs-greedy");
  h.params.n_slots = 48;
  h.thetas = {kPi / 2};
  h.seeds = {1, 2, 3, 4};
  h.threads = 1;
  const std::string b = csv(run_experiment(h));
  h.threads = 4;
  CHECK(b == csv(run_experiment(h)));
}

TEST_CASE("result layout and metadata") {
  ExperimentSpec spec = default_spec("hybrid-vs-greedy");
  spec.params.n_slots = 24;
  spec.thetas = {0.0, kPi};
  spec.seeds = {5, 6};
  const ExperimentResult r = run_experiment(spec);
  const auto meta = metadata(r);
  for (const char* key : {"alpha", "beta", "s_max", "n_slots", "gamma", "eps_lex", "seeds",
                          "case_tol", "version", "noise_scale"}) {
    CHECK_MESSAGE(meta.count(key) == 1, key);
  }
  CHECK(meta.at("seeds") == "5;6");
  CHECK(meta.at("gamma") == "0.36000000000000004");

  std::map<std::string, int> per_metric;
  for (const ResultRow& row : r.rows) ++per_metric[row.metric];
  CHECK(per_metric.size() == 4);
  for (const auto& [m, n] : per_metric) CHECK(n == 2);

  const std::string text = csv(r);
  CHECK(text.find("\ntheta,smax,metric,value\n") != std::string::npos);
  CHECK(text.rfind("#experiment=hybrid-vs-greedy\n", 0) == 0);
  CHECK_THROWS_AS(r.value(1.0, 3.5, "greedy_loss_mean"), ValidationError);
}

TEST_CASE("noise-free hybrid matches the offline optimum") {
  ExperimentSpec spec = default_spec("hybrid-vs-greedy");
  spec.noise_scale = 0.0;
  spec.seeds = {1};
  spec.thetas = {0.0, kPi / 2, kPi};
  const ExperimentResult r = run_experiment(spec);
  for (double v : r.column("hybrid_loss_mean")) CHECK(std::abs(v) <= 1e-4);
  CHECK(r.audit.infeasible == 0);
}

TEST_CASE("worker pool") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t k) { hits[k] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));

  std::atomic<int> ran{0};
  CHECK_THROWS_AS(parallel_for(50, 3,
                               [&](std::size_t k) {
                                 ++ran;
                                 if (k == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);

  ::setenv(kThreadsEnv, "2", 1);
  CHECK(worker_count(8) == 2);
  CHECK(worker_count(1) == 1);
  ::setenv(kThreadsEnv, "junk", 1);
  CHECK(worker_count(8) == 8);
  ::unsetenv(kThreadsEnv);
  CHECK(worker_count(0) >= 1);
}
