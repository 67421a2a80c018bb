// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace ecoop::testing {

SystemParams random_params(Rng& rng, std::size_t n_slots) {
  SystemParams p;
  p.alpha = rng.open_closed(0.0, 1.0);
  p.beta = rng.open_closed(0.0, 1.0);
  p.s_max = rng.uniform(0.5, 3.0);
  p.n_slots = n_slots;
  return p;
}

std::vector<double> random_series(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

NetEnergyProfile random_profile(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> e1 = random_series(rng, n, lo, hi);
  std::vector<double> e2 = random_series(rng, n, lo, hi);
  return NetEnergyProfile::from_net(std::move(e1), std::move(e2));
}

LpProblem random_program(Rng& rng) {
  LpProblem p;
  const std::size_t n = rng.index(1, 6);
  std::vector<double> x0(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = rng.coin(0.7) ? 0.0 : rng.uniform(-2.0, 0.0);
    const double hi = lo + rng.uniform(0.0, 3.0) * (rng.coin(0.1) ? 0.0 : 1.0);
    p.add_variable("x" + std::to_string(j), rng.uniform(-1.0, 1.0), lo, hi);
    x0[j] = rng.uniform(lo, hi);
  }
  auto row = [&] {
    std::vector<LinearTerm> terms;
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.coin(0.75)) terms.push_back({j, std::round(rng.uniform(-2.0, 2.0) * 4.0) / 4.0});
    }
    return terms;
  };
  const std::size_t neq = rng.index(0, std::min<std::size_t>(2, n));
  for (std::size_t k = 0; k < neq; ++k) {
    auto terms = row();
    LpRow r{terms, 0.0, {}};
    p.add_eq(terms, row_activity(r, x0));
  }
  const std::size_t nub = rng.index(0, 4);
  for (std::size_t k = 0; k < nub; ++k) {
    auto terms = row();
    LpRow r{terms, 0.0, {}};
    const double shift = rng.coin(0.1) ? -rng.uniform(1.0, 5.0) : rng.uniform(0.0, 1.0);
    const double rhs = row_activity(r, x0) + shift;
    p.add_ub(terms, rhs);
  }
  return p;
}

namespace {

struct Plane {
  std::vector<double> a;
  double b;
};

}  // namespace

VertexOracleResult vertex_enumeration(const LpProblem& problem, double tol) {
  const std::size_t n = problem.num_vars();
  auto dense = [n](const LpRow& row) {
    std::vector<double> a(n, 0.0);
    for (const LinearTerm& t : row.terms) a[t.var] += t.coeff;
    return a;
  };
  // Equality rows are just planes that every feasible point lies on; the
  // violation check below enforces them.
  std::vector<Plane> planes;
  for (const LpRow& r : problem.eq_constraints) planes.push_back({dense(r), r.rhs});
  for (const LpRow& r : problem.ub_constraints) planes.push_back({dense(r), r.rhs});
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    if (std::isfinite(problem.lower[j])) planes.push_back({e, problem.lower[j]});
    if (std::isfinite(problem.upper[j])) planes.push_back({e, problem.upper[j]});
  }

  VertexOracleResult best;
  best.objective = std::numeric_limits<double>::infinity();
  if (n > planes.size()) return best;

  std::vector<std::size_t> idx(n);
  for (std::size_t k = 0; k < n; ++k) idx[k] = k;
  const auto N = static_cast<Eigen::Index>(n);
  while (true) {
    Eigen::MatrixXd A(N, N);
    Eigen::VectorXd b(N);
    for (std::size_t r = 0; r < n; ++r) {
      const Plane& pl = planes[idx[r]];
      for (std::size_t j = 0; j < n; ++j) {
        A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = pl.a[j];
      }
      b(static_cast<Eigen::Index>(r)) = pl.b;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.rank() == N) {
      const Eigen::VectorXd xe = lu.solve(b);
      std::vector<double> x(xe.data(), xe.data() + n);
      if (max_violation(problem, x) <= tol) {
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) obj += problem.objective[j] * x[j];
        if (obj < best.objective) {
          best.objective = obj;
          best.x = x;
          best.feasible = true;
        }
      }
    }
    // Next combination in lexicographic order.
    std::size_t k = n;
    while (k > 0 && idx[k - 1] == planes.size() - n + k - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t m = k; m < n; ++m) idx[m] = idx[m - 1] + 1;
  }
  return best;
}

namespace {

/// Energy left at a BS after moving its storage from `from` to `to`.
double after_storage(double e, double from, double to, double alpha) {
  const double move = to - from;
  return move >= 0.0 ? e - move / alpha : e + alpha * (-move);
}

std::vector<double> levels(double s_max, double step) {
  std::vector<double> out;
  const std::size_t count = static_cast<std::size_t>(std::floor(s_max / step + 1e-9)) + 1;
  for (std::size_t k = 0; k < count; ++k) out.push_back(k * step);
  return out;
}

}  // namespace

double brute_force_two_slot(const SystemParams& p, const NetEnergyProfile& prof, double step,
                            double z_max) {
  const std::vector<double> lv = levels(p.s_max, step);
  std::vector<double> zs;
  const long zc = std::lround(z_max / step);
  for (long k = -zc; k <= zc; ++k) zs.push_back(k * step);
  const std::size_t L = lv.size(), Z = zs.size();
  const double inf = std::numeric_limits<double>::infinity();

  auto grid_draw = [&](std::size_t bs, double r, double z) {
    // z > 0 means BS 1 sends z and BS 2 receives beta*z.
    if (bs == 0) r += z >= 0.0 ? -z : p.beta * (-z);
    else r += z >= 0.0 ? p.beta * z : z;
    return std::max(0.0, -r);
  };

  // Last slot: each BS picks its own final level given the transfer.
  std::vector<double> h[2];
  for (std::size_t bs = 0; bs < 2; ++bs) {
    h[bs].assign(L * Z, inf);
    for (std::size_t a = 0; a < L; ++a) {
      for (std::size_t zi = 0; zi < Z; ++zi) {
        double best = inf;
        for (std::size_t c = 0; c < L; ++c) {
          const double r = after_storage(prof.e(bs)[1], lv[a], lv[c], p.alpha);
          if (p.alpha <= 0.0 && lv[c] > lv[a]) continue;
          best = std::min(best, grid_draw(bs, r, zs[zi]));
        }
        h[bs][a * Z + zi] = best;
      }
    }
  }

  double best_total = inf;
  for (std::size_t a = 0; a < L; ++a) {
    if (p.alpha <= 0.0 && a > 0) break;
    for (std::size_t b = 0; b < L; ++b) {
      if (p.alpha <= 0.0 && b > 0) break;
      const double r1 = after_storage(prof.e1[0], 0.0, lv[a], p.alpha);
      const double r2 = after_storage(prof.e2[0], 0.0, lv[b], p.alpha);
      double first = inf, second = inf;
      for (std::size_t zi = 0; zi < Z; ++zi) {
        first = std::min(first, grid_draw(0, r1, zs[zi]) + grid_draw(1, r2, zs[zi]));
        second = std::min(second, h[0][a * Z + zi] + h[1][b * Z + zi]);
      }
      best_total = std::min(best_total, first + second);
    }
  }
  return best_total;
}

double brute_force_single(const SystemParams& p, const std::vector<double>& e, double step) {
  const std::vector<double> lv = levels(p.s_max, step);
  const std::size_t L = lv.size();
  std::vector<double> value(L, 0.0), next(L);
  for (std::size_t t = e.size(); t-- > 0;) {
    for (std::size_t a = 0; a < L; ++a) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < L; ++c) {
        if (p.alpha <= 0.0 && c > a) continue;
        const double r = after_storage(e[t], lv[a], lv[c], p.alpha);
        best = std::min(best, std::max(0.0, -r) + value[c]);
      }
      next[a] = best;
    }
    value.swap(next);
  }
  return value[0];
}

}  // namespace ecoop::testing
