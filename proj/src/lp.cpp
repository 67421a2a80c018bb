// SPDX-License-Identifier: Apache-2.0
#include "ecoop/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>

#include <Eigen/Dense>

#include "ecoop/errors.hpp"

namespace ecoop {

std::size_t LpProblem::add_variable(std::string label, double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  labels.push_back(std::move(label));
  return objective.size() - 1;
}

void LpProblem::add_eq(std::vector<LinearTerm> terms, double rhs, std::string label) {
  eq_constraints.push_back(LpRow{std::move(terms), rhs, std::move(label)});
}

void LpProblem::add_ub(std::vector<LinearTerm> terms, double rhs, std::string label) {
  ub_constraints.push_back(LpRow{std::move(terms), rhs, std::move(label)});
}

void LpProblem::validate() const {
  const std::size_t n = num_vars();
  if (lower.size() != n || upper.size() != n) {
    throw ValidationError("bounds do not match the number of variables");
  }
  if (!labels.empty() && labels.size() != n) {
    throw ValidationError("labels do not match the number of variables");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(objective[j]) || std::isinf(objective[j])) {
      throw ValidationError("non-finite objective coefficient");
    }
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] ||
        lower[j] == kInf || upper[j] == -kInf) {
      throw ValidationError("invalid bounds on variable " + std::to_string(j));
    }
  }
  auto check_rows = [n](const std::vector<LpRow>& rows) {
    for (const LpRow& row : rows) {
      if (!std::isfinite(row.rhs)) {
        throw ValidationError("non-finite right-hand side");
      }
      for (const LinearTerm& t : row.terms) {
        if (t.var >= n || !std::isfinite(t.coeff)) {
          throw ValidationError("bad term in row '" + row.label + "'");
        }
      }
    }
  };
  check_rows(eq_constraints);
  check_rows(ub_constraints);
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

double row_activity(const LpRow& row, const std::vector<double>& x) {
  double sum = 0.0;
  for (const LinearTerm& t : row.terms) {
    sum += t.coeff * x[t.var];
  }
  return sum;
}

double max_violation(const LpProblem& problem, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < problem.num_vars(); ++j) {
    worst = std::max({worst, problem.lower[j] - x[j], x[j] - problem.upper[j]});
  }
  for (const LpRow& row : problem.eq_constraints) {
    worst = std::max(worst, std::abs(row_activity(row, x) - row.rhs));
  }
  for (const LpRow& row : problem.ub_constraints) {
    worst = std::max(worst, row_activity(row, x) - row.rhs);
  }
  return worst;
}

void dump_problem(const LpProblem& problem, std::ostream& os) {
  auto name = [&](std::size_t j) {
    return (j < problem.labels.size() && !problem.labels[j].empty()) ? problem.labels[j]
                                                                      : "x" + std::to_string(j);
  };
  auto dump_rows = [&](const std::vector<LpRow>& rows, const char* prefix, const char* sense) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const LpRow& row = rows[r];
      os << (row.label.empty() ? std::string(prefix) + std::to_string(r) : row.label) << ":";
      for (const LinearTerm& t : row.terms) {
        os << ' ' << (t.coeff < 0 ? "- " : "+ ") << std::abs(t.coeff) << ' ' << name(t.var);
      }
      os << ' ' << sense << ' ' << row.rhs << '\n';
    }
  };
  os << "min:";
  for (std::size_t j = 0; j < problem.num_vars(); ++j) {
    if (problem.objective[j] != 0.0) {
      os << ' ' << (problem.objective[j] < 0 ? "- " : "+ ") << std::abs(problem.objective[j])
         << ' ' << name(j);
    }
  }
  os << '\n';
  dump_rows(problem.eq_constraints, "eq", "=");
  dump_rows(problem.ub_constraints, "ub", "<=");
  for (std::size_t j = 0; j < problem.num_vars(); ++j) {
    os << "bound " << name(j) << ": " << problem.lower[j] << " .. " << problem.upper[j] << '\n';
  }
}

namespace {

enum class VarState : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree, kFixed };

/// Working form: all rows are equalities over structural, slack and
/// artificial columns. The basis inverse is kept dense and column-major.
class Simplex {
 public:
  Simplex(const LpProblem& p, const LpOptions& opt) : problem_(p), opt_(opt) { build(); }

  LpSolution run() {
    LpSolution sol;
    if (has_phase1_) {
      set_phase1_costs();
      const LpStatus st = iterate();
      if (st == LpStatus::kUnbounded) {
        throw SolverError("phase 1 reported unbounded");
      }
      double infeas = 0.0;
      for (std::size_t j = first_artificial_; j < ncols_; ++j) {
        infeas += std::max(0.0, x_[j]);
      }
      if (infeas > phase1_tol_) {
        sol.status = LpStatus::kInfeasible;
        sol.iterations = iterations_;
        return sol;
      }
      for (std::size_t j = first_artificial_; j < ncols_; ++j) {
        up_[j] = 0.0;
        if (state_[j] != VarState::kBasic) {
          state_[j] = VarState::kFixed;
          x_[j] = 0.0;
        }
      }
    }
    set_phase2_costs();
    const LpStatus st = iterate();
    sol.iterations = iterations_;
    if (st == LpStatus::kUnbounded) {
      sol.status = LpStatus::kUnbounded;
      return sol;
    }
    certify();
    sol.status = LpStatus::kOptimal;
    sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      obj += problem_.objective[j] * sol.x[j];
    }
    sol.objective_value = obj;
    return sol;
  }

 private:
  // ---- setup -------------------------------------------------------------

  void build() {
    n_ = problem_.num_vars();
    m_eq_ = problem_.eq_constraints.size();
    m_ = m_eq_ + problem_.ub_constraints.size();

    // Structural columns, merging duplicate indices within a row.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> cols(n_);
    auto add_row = [&](const LpRow& row, std::size_t r) {
      std::map<std::size_t, double> merged;
      for (const LinearTerm& t : row.terms) {
        merged[t.var] += t.coeff;
      }
      for (const auto& [j, v] : merged) {
        if (v != 0.0) {
          cols[j].push_back({static_cast<std::uint32_t>(r), v});
        }
      }
      b_.push_back(row.rhs);
    };
    for (std::size_t r = 0; r < m_eq_; ++r) add_row(problem_.eq_constraints[r], r);
    for (std::size_t r = 0; r < problem_.ub_constraints.size(); ++r) {
      add_row(problem_.ub_constraints[r], m_eq_ + r);
    }

    lo_ = problem_.lower;
    up_ = problem_.upper;
    x_.assign(n_, 0.0);
    state_.assign(n_, VarState::kAtLower);
    for (std::size_t j = 0; j < n_; ++j) {
      if (lo_[j] == up_[j]) {
        state_[j] = VarState::kFixed;
        x_[j] = lo_[j];
      } else if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
      } else if (std::isfinite(up_[j])) {
        state_[j] = VarState::kAtUpper;
        x_[j] = up_[j];
      } else {
        state_[j] = VarState::kFree;
      }
    }

    std::vector<double> residual = b_;
    for (std::size_t j = 0; j < n_; ++j) {
      if (x_[j] == 0.0) continue;
      for (const auto& [r, v] : cols[j]) residual[r] -= v * x_[j];
    }

    double bscale = 1.0;
    for (double v : b_) bscale = std::max(bscale, std::abs(v));
    phase1_tol_ = std::max(opt_.feasibility_tol, std::min(1e-7, 1e-9 * bscale * static_cast<double>(m_)));
    cert_tol_ = std::max(opt_.feasibility_tol, 1e-9 * bscale);

    // Slack columns for ub rows.
    basis_.assign(m_, 0);
    std::vector<double> basis_sign(m_, 1.0);
    std::vector<std::size_t> need_artificial;
    for (std::size_t r = m_eq_; r < m_; ++r) {
      const std::size_t j = cols.size();
      cols.push_back({{static_cast<std::uint32_t>(r), 1.0}});
      lo_.push_back(0.0);
      up_.push_back(kInf);
      if (residual[r] >= 0.0) {
        x_.push_back(residual[r]);
        state_.push_back(VarState::kBasic);
        basis_[r] = j;
      } else {
        x_.push_back(0.0);
        state_.push_back(VarState::kAtLower);
        need_artificial.push_back(r);
      }
    }
    for (std::size_t r = 0; r < m_eq_; ++r) need_artificial.push_back(r);
    std::sort(need_artificial.begin(), need_artificial.end());

    first_artificial_ = cols.size();
    has_phase1_ = false;
    for (std::size_t r : need_artificial) {
      const std::size_t j = cols.size();
      const double sign = residual[r] < 0.0 ? -1.0 : 1.0;
      cols.push_back({{static_cast<std::uint32_t>(r), sign}});
      const double value = std::abs(residual[r]);
      lo_.push_back(0.0);
      up_.push_back(value > 0.0 ? kInf : 0.0);
      x_.push_back(value);
      state_.push_back(VarState::kBasic);
      basis_[r] = j;
      basis_sign[r] = sign;
      if (value > 0.0) has_phase1_ = true;
    }
    ncols_ = cols.size();

    col_start_.assign(ncols_ + 1, 0);
    for (std::size_t j = 0; j < ncols_; ++j) col_start_[j + 1] = col_start_[j] + cols[j].size();
    row_idx_.resize(col_start_[ncols_]);
    val_.resize(col_start_[ncols_]);
    for (std::size_t j = 0; j < ncols_; ++j) {
      std::size_t k = col_start_[j];
      for (const auto& [r, v] : cols[j]) {
        row_idx_[k] = r;
        val_[k] = v;
        ++k;
      }
    }

    binv_.assign(m_ * m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) binv_[r * m_ + r] = 1.0 / basis_sign[r];

    cost_.assign(ncols_, 0.0);
    y_.assign(m_, 0.0);
    alpha_.assign(m_, 0.0);
    max_iterations_ = opt_.max_iterations ? opt_.max_iterations : 50 * (m_ + ncols_) + 1000;
  }

  void set_phase1_costs() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (std::size_t j = first_artificial_; j < ncols_; ++j) {
      if (up_[j] > 0.0) cost_[j] = 1.0;
    }
  }

  void set_phase2_costs() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    std::copy(problem_.objective.begin(), problem_.objective.end(), cost_.begin());
  }

  // ---- linear algebra ----------------------------------------------------

  double binv(std::size_t row, std::size_t col) const { return binv_[col * m_ + row]; }

  void recompute_duals() {
    for (std::size_t k = 0; k < m_; ++k) {
      const double* col = &binv_[k * m_];
      double sum = 0.0;
      for (std::size_t i = 0; i < m_; ++i) sum += cost_[basis_[i]] * col[i];
      y_[k] = sum;
    }
  }

  void recompute_basic_values() {
    std::vector<double> rhs = b_;
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
      for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        rhs[row_idx_[k]] -= val_[k] * x_[j];
      }
    }
    std::vector<double> xb(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      if (rhs[k] == 0.0) continue;
      const double* col = &binv_[k * m_];
      for (std::size_t i = 0; i < m_; ++i) xb[i] += col[i] * rhs[k];
    }
    for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
  }

  /// Rebuilds the basis inverse from scratch with a dense LU.
  void reinvert() {
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_),
                                                  static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t j = basis_[i];
      for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        basis(static_cast<Eigen::Index>(row_idx_[k]), static_cast<Eigen::Index>(i)) = val_[k];
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
    const Eigen::MatrixXd inv = lu.inverse();
    if (!inv.allFinite()) {
      throw SolverError("singular basis during reinversion");
    }
    // Eigen is column-major, matching binv_ layout.
    std::copy(inv.data(), inv.data() + m_ * m_, binv_.begin());
    recompute_basic_values();
    recompute_duals();
  }

  double reduced_cost(std::size_t j) const {
    double d = cost_[j];
    for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) d -= y_[row_idx_[k]] * val_[k];
    return d;
  }

  void ftran(std::size_t q) {
    std::fill(alpha_.begin(), alpha_.end(), 0.0);
    for (std::size_t k = col_start_[q]; k < col_start_[q + 1]; ++k) {
      const double v = val_[k];
      const double* col = &binv_[static_cast<std::size_t>(row_idx_[k]) * m_];
      for (std::size_t i = 0; i < m_; ++i) alpha_[i] += v * col[i];
    }
  }

  // ---- main loop ---------------------------------------------------------

  LpStatus iterate() {
    recompute_duals();
    std::size_t degenerate_run = 0;
    std::size_t since_refresh = 0;
    std::vector<std::size_t> nz;
    nz.reserve(m_);

    while (true) {
      if (iterations_ >= max_iterations_) {
        throw SolverError("simplex iteration limit reached");
      }
      if (since_refresh >= kRefreshInterval) {
        recompute_duals();
        recompute_basic_values();
        since_refresh = 0;
      }
      const bool bland = degenerate_run >= opt_.degenerate_limit;

      // Pricing.
      std::size_t q = ncols_;
      double best = 0.0;
      double dq = 0.0;
      int dir = 0;
      for (std::size_t j = 0; j < ncols_; ++j) {
        const VarState st = state_[j];
        if (st == VarState::kBasic || st == VarState::kFixed) continue;
        const double d = reduced_cost(j);
        int cand = 0;
        if (d < -opt_.optimality_tol && (st == VarState::kAtLower || st == VarState::kFree)) {
          cand = 1;
        } else if (d > opt_.optimality_tol && (st == VarState::kAtUpper || st == VarState::kFree)) {
          cand = -1;
        }
        if (cand == 0) continue;
        if (bland) {
          q = j;
          dq = d;
          dir = cand;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dq = d;
          dir = cand;
        }
      }
      if (q == ncols_) {
        // Confirm with fresh duals before declaring optimality.
        if (since_refresh != 0) {
          recompute_duals();
          recompute_basic_values();
          since_refresh = 0;
          continue;
        }
        return LpStatus::kOptimal;
      }

      ftran(q);
      nz.clear();
      for (std::size_t i = 0; i < m_; ++i) {
        if (std::abs(alpha_[i]) > opt_.pivot_tol) nz.push_back(i);
      }

      // Ratio test. Basic i moves at rate -dir * alpha_i per unit step.
      const double flip = up_[q] - lo_[q];
      std::size_t leave = m_;
      double theta = kInf;
      bool leave_to_upper = false;
      if (bland) {
        for (std::size_t i : nz) {
          const auto [ratio, to_upper] = exact_ratio(i, dir);
          if (ratio == kInf) continue;
          if (ratio < theta - 1e-12 ||
              (ratio <= theta + 1e-12 && leave < m_ && basis_[i] < basis_[leave])) {
            theta = ratio;
            leave = i;
            leave_to_upper = to_upper;
          }
        }
      } else {
        double theta_max = kInf;
        for (std::size_t i : nz) {
          const double rate = -dir * alpha_[i];
          const std::size_t j = basis_[i];
          double r = kInf;
          if (rate < 0.0) {
            if (std::isfinite(lo_[j])) r = (x_[j] - lo_[j] + opt_.feasibility_tol) / -rate;
          } else if (std::isfinite(up_[j])) {
            r = (up_[j] - x_[j] + opt_.feasibility_tol) / rate;
          }
          theta_max = std::min(theta_max, r);
        }
        if (theta_max < kInf) {
          double best_pivot = 0.0;
          for (std::size_t i : nz) {
            const auto [ratio, to_upper] = exact_ratio(i, dir);
            if (ratio <= theta_max && std::abs(alpha_[i]) > best_pivot) {
              best_pivot = std::abs(alpha_[i]);
              leave = i;
              theta = ratio;
              leave_to_upper = to_upper;
            }
          }
        }
      }

      ++iterations_;
      ++since_refresh;

      if (flip <= theta) {
        if (flip == kInf) {
          return LpStatus::kUnbounded;
        }
        // Entering variable runs to its opposite bound; basis unchanged.
        const double step = dir * flip;
        for (std::size_t i : nz) x_[basis_[i]] -= step * alpha_[i];
        if (dir > 0) {
          x_[q] = up_[q];
          state_[q] = VarState::kAtUpper;
        } else {
          x_[q] = lo_[q];
          state_[q] = VarState::kAtLower;
        }
        degenerate_run = flip > 1e-12 ? 0 : degenerate_run + 1;
        continue;
      }

      theta = std::max(theta, 0.0);
      degenerate_run = theta > 1e-12 ? 0 : degenerate_run + 1;

      const double step = dir * theta;
      for (std::size_t i : nz) x_[basis_[i]] -= step * alpha_[i];
      x_[q] += step;

      const std::size_t out = basis_[leave];
      if (leave_to_upper) {
        x_[out] = up_[out];
        state_[out] = (lo_[out] == up_[out]) ? VarState::kFixed : VarState::kAtUpper;
      } else {
        x_[out] = lo_[out];
        state_[out] = (lo_[out] == up_[out]) ? VarState::kFixed : VarState::kAtLower;
      }
      basis_[leave] = q;
      state_[q] = VarState::kBasic;

      pivot(leave, nz);
      // y <- y + d_q * (updated row `leave` of B^-1)
      for (std::size_t k = 0; k < m_; ++k) y_[k] += dq * binv_[k * m_ + leave];
    }
  }

  std::pair<double, bool> exact_ratio(std::size_t i, int dir) const {
    const double rate = -dir * alpha_[i];
    const std::size_t j = basis_[i];
    if (rate < 0.0) {
      if (!std::isfinite(lo_[j])) return {kInf, false};
      return {std::max(0.0, (x_[j] - lo_[j]) / -rate), false};
    }
    if (!std::isfinite(up_[j])) return {kInf, true};
    return {std::max(0.0, (up_[j] - x_[j]) / rate), true};
  }

  void pivot(std::size_t r, const std::vector<std::size_t>& nz) {
    const double piv = alpha_[r];
    for (std::size_t k = 0; k < m_; ++k) {
      double* col = &binv_[k * m_];
      const double p = col[r];
      if (p == 0.0) continue;
      const double scaled = p / piv;
      for (std::size_t i : nz) col[i] -= alpha_[i] * scaled;
      col[r] = scaled;
    }
  }

  // ---- certification -----------------------------------------------------

  double worst_violation() const {
    double worst = 0.0;
    for (std::size_t j = 0; j < ncols_; ++j) {
      worst = std::max({worst, lo_[j] - x_[j], x_[j] - up_[j]});
    }
    std::vector<double> activity(m_, 0.0);
    for (std::size_t j = 0; j < ncols_; ++j) {
      for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        activity[row_idx_[k]] += val_[k] * x_[j];
      }
    }
    for (std::size_t r = 0; r < m_; ++r) worst = std::max(worst, std::abs(activity[r] - b_[r]));
    return worst;
  }

  void certify() {
    recompute_basic_values();
    if (worst_violation() <= cert_tol_) {
      return;
    }
    reinvert();
    // A fresh inverse may expose slightly infeasible basics; polish them.
    const LpStatus st = iterate();
    if (st != LpStatus::kOptimal) {
      throw SolverError("unbounded direction found while polishing the optimum");
    }
    recompute_basic_values();
    const double v = worst_violation();
    if (v > cert_tol_) {
      throw SolverError("optimal basis violates constraints by " + std::to_string(v));
    }
  }

  std::vector<double> structural() const {
    return std::vector<double>(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
  }

  static constexpr std::size_t kRefreshInterval = 64;

  const LpProblem& problem_;
  LpOptions opt_;
  std::size_t n_ = 0, m_ = 0, m_eq_ = 0, ncols_ = 0, first_artificial_ = 0;
  bool has_phase1_ = false;
  double phase1_tol_ = 1e-9;
  double cert_tol_ = 1e-9;
  std::vector<std::size_t> col_start_;
  std::vector<std::uint32_t> row_idx_;
  std::vector<double> val_;
  std::vector<double> b_, lo_, up_, x_, cost_, y_, alpha_;
  std::vector<VarState> state_;
  std::vector<std::size_t> basis_;
  std::vector<double> binv_;
  std::size_t iterations_ = 0;
  std::size_t max_iterations_ = 0;
};

}  // namespace

LpSolution lp_solve(const LpProblem& problem, const LpOptions& options) {
  problem.validate();
  if (problem.eq_constraints.empty() && problem.ub_constraints.empty()) {
    // Pure box problem: each variable sits at its cheaper bound.
    LpSolution sol;
    sol.x.resize(problem.num_vars());
    for (std::size_t j = 0; j < problem.num_vars(); ++j) {
      const double c = problem.objective[j];
      double v;
      if (c > 0.0) {
        v = problem.lower[j];
      } else if (c < 0.0) {
        v = problem.upper[j];
      } else {
        v = std::isfinite(problem.lower[j]) ? problem.lower[j]
            : std::isfinite(problem.upper[j]) ? problem.upper[j] : 0.0;
      }
      if (!std::isfinite(v)) {
        sol.status = LpStatus::kUnbounded;
        sol.x.clear();
        return sol;
      }
      sol.x[j] = v;
      sol.objective_value += c * v;
    }
    sol.status = LpStatus::kOptimal;
    return sol;
  }
  Simplex simplex(problem, options);
  return simplex.run();
}

}  // namespace ecoop
