// Copyright 2026 The RRUC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "rruc/error.hpp"
#include "rruc/fleet.hpp"

namespace rruc {

struct RelaxConfig {
  double tol = 1e-6;
  int max_outer = 500;
  int max_inner = 2000;
  int max_stalled = 25;  // outer iterations allowed without progress
};

/// A discretionary unit of the relaxed commitment problem, written in terms of
/// one score y in [0, 1]:
///
///   cost     produces ? y * cost(P) : 0  +  penalty * (y - prev_status)^2  +  score_cost * y
///   supply   produces ? y * P : 0        +  (1 - y) * idle_supply
///   capacity y * cap_max                 floor  y * cap_min
///
/// The runtime model uses y = u. The ramp model maps an on unit to y = 1 - w
/// (prev_status 1, idle_supply = first ramp-down output) and an off unit to
/// y = v (produces false, score_cost = beta * average cost).
struct RelaxedUnit {
  CostCurve cost;
  double lower = 0.0;
  double upper = 0.0;
  double cap_max = 0.0;
  double cap_min = 0.0;
  double penalty = 0.0;
  double prev_status = 0.0;
  bool produces = true;
  double idle_supply = 0.0;
  double score_cost = 0.0;
};

struct MustRunUnit {
  CostCurve cost;
  double lower = 0.0;
  double upper = 0.0;
  double cap_max = 0.0;
  double cap_min = 0.0;
};

/// Rows: supply >= demand, capacity >= capacity_target, floor <= floor_target.
/// An infinite floor_target disables the floor row.
struct RelaxedProblem {
  std::vector<RelaxedUnit> units;
  std::vector<MustRunUnit> must_run;
  double demand = 0.0;
  double capacity_target = 0.0;
  double floor_target = std::numeric_limits<double>::infinity();
};

enum class RelaxStatus { converged, not_converged, infeasible };

inline std::string_view to_string(RelaxStatus s) {
  switch (s) {
    case RelaxStatus::converged: return "converged";
    case RelaxStatus::not_converged: return "not_converged";
    case RelaxStatus::infeasible: return "infeasible";
  }
  return "?";
}

struct RelaxedSolution {
  std::vector<double> y;           // per discretionary unit
  std::vector<double> p;           // MW per discretionary unit (lower bound when not producing)
  std::vector<double> must_run_p;  // MW per must-run unit
  std::array<double, 3> multipliers{};  // $/MW for supply, capacity, floor rows
  bool floor_active = false;
  double objective = 0.0;
  double kkt_residual = std::numeric_limits<double>::infinity();
  RelaxStatus status = RelaxStatus::not_converged;
  int outer_iterations = 0;
  int inner_iterations = 0;
};

namespace detail {

/// Evaluates the relaxed problem in unit-box coordinates z = [y, s, s_mr] with
/// P = lower + s * (upper - lower).
class RelaxedModel {
 public:
  static constexpr int kRows = 3;

  RelaxedModel(const RelaxedProblem& pb, bool floor_active)
      : pb_(pb), nd_(pb.units.size()), nm_(pb.must_run.size()), floor_active_(floor_active) {
    row_scale_ = {std::max(1.0, std::abs(pb.demand)), std::max(1.0, std::abs(pb.capacity_target)),
                  floor_active ? std::max(1.0, std::abs(pb.floor_target)) : 1.0};
    for (const auto& m : pb.must_run) {
      mr_cap_max_ += m.cap_max;
      mr_cap_min_ += m.cap_min;
    }
  }

  std::size_t size() const noexcept { return 2 * nd_ + nm_; }
  std::size_t discretionary() const noexcept { return nd_; }
  bool floor_active() const noexcept { return floor_active_; }
  double row_scale(int j) const noexcept { return row_scale_[j]; }

  double power(std::span<const double> z, std::size_t i) const noexcept {
    const auto& u = pb_.units[i];
    return std::min(u.upper, u.lower + z[nd_ + i] * (u.upper - u.lower));
  }
  double must_run_power(std::span<const double> z, std::size_t m) const noexcept {
    const auto& u = pb_.must_run[m];
    return std::min(u.upper, u.lower + z[2 * nd_ + m] * (u.upper - u.lower));
  }

  /// Objective and raw row values g_j (feasible when g_j >= 0).
  double evaluate(std::span<const double> z, std::array<double, kRows>& g) const noexcept {
    double f = 0.0, supply = 0.0, cap = mr_cap_max_, floor = mr_cap_min_;
    for (std::size_t i = 0; i < nd_; ++i) {
      const auto& u = pb_.units[i];
      const double y = z[i];
      if (u.produces) {
        const double p = power(z, i);
        f += y * u.cost(p);
        supply += y * p;
      }
      const double dy = y - u.prev_status;
      f += u.penalty * dy * dy + u.score_cost * y;
      supply += (1.0 - y) * u.idle_supply;
      cap += y * u.cap_max;
      floor += y * u.cap_min;
    }
    for (std::size_t m = 0; m < nm_; ++m) {
      const double p = must_run_power(z, m);
      f += pb_.must_run[m].cost(p);
      supply += p;
    }
    g[0] = supply - pb_.demand;
    g[1] = cap - pb_.capacity_target;
    g[2] = floor_active_ ? pb_.floor_target - floor : 0.0;
    return f;
  }

  /// grad = grad f - sum_j weight_j * grad g_j.
  void lagrangian_gradient(std::span<const double> z, const std::array<double, kRows>& weight,
                           std::span<double> grad) const noexcept {
    for (std::size_t i = 0; i < nd_; ++i) {
      const auto& u = pb_.units[i];
      const double y = z[i];
      double gy = 2.0 * u.penalty * (y - u.prev_status) + u.score_cost;
      double gs = 0.0;
      double dsupply_dy = -u.idle_supply;
      if (u.produces) {
        const double p = power(z, i);
        const double width = u.upper - u.lower;
        gy += u.cost(p);
        dsupply_dy += p;
        gs = y * width * (u.cost.marginal(p) - weight[0]);
      }
      gy -= weight[0] * dsupply_dy + weight[1] * u.cap_max - weight[2] * u.cap_min;
      grad[i] = gy;
      grad[nd_ + i] = gs;
    }
    for (std::size_t m = 0; m < nm_; ++m) {
      const auto& u = pb_.must_run[m];
      const double p = must_run_power(z, m);
      grad[2 * nd_ + m] = (u.upper - u.lower) * (u.cost.marginal(p) - weight[0]);
    }
  }

 private:
  const RelaxedProblem& pb_;
  std::size_t nd_, nm_;
  bool floor_active_;
  std::array<double, kRows> row_scale_{};
  double mr_cap_max_ = 0.0, mr_cap_min_ = 0.0;
};

inline double projected_step_norm(std::span<const double> z, std::span<const double> grad,
                                  double step) noexcept {
  double r = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k)
    r = std::max(r, std::abs(std::clamp(z[k] - step * grad[k], 0.0, 1.0) - z[k]));
  return r;
}

/// Scaled KKT residual: max of projected stationarity, relative row violation
/// and complementarity, with the objective-valued terms divided by 1 + |f|.
inline double kkt_residual(const RelaxedModel& model, std::span<const double> z,
                           const std::array<double, 3>& mu, std::vector<double>& scratch) {
  std::array<double, 3> g{};
  const double f = model.evaluate(z, g);
  const double fs = 1.0 + std::abs(f);
  scratch.resize(z.size());
  model.lagrangian_gradient(z, mu, scratch);
  double r = projected_step_norm(z, scratch, 1.0 / fs);
  const int rows = model.floor_active() ? 3 : 2;
  for (int j = 0; j < rows; ++j) {
    r = std::max(r, std::max(0.0, -g[j]) / model.row_scale(j));
    r = std::max(r, mu[j] * std::abs(g[j]) / fs);
  }
  return r;
}

/// Whether some y in [0,1]^n meets both the capacity and the floor rows
/// (fractional knapsack on cap_max per unit of cap_min).
inline bool capacity_and_floor_compatible(const RelaxedProblem& pb) {
  double need = pb.capacity_target, room = pb.floor_target;
  for (const auto& m : pb.must_run) {
    need -= m.cap_max;
    room -= m.cap_min;
  }
  if (room < 0.0) return false;
  std::vector<std::size_t> idx(pb.units.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto ratio = [&](std::size_t i) {
    const auto& u = pb.units[i];
    return u.cap_min > 0.0 ? u.cap_max / u.cap_min : std::numeric_limits<double>::infinity();
  };
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return ratio(a) > ratio(b); });
  double got = 0.0;
  for (std::size_t i : idx) {
    const auto& u = pb.units[i];
    const double frac = u.cap_min > 0.0 ? std::min(1.0, room / u.cap_min) : 1.0;
    got += frac * u.cap_max;
    room -= frac * u.cap_min;
    if (room <= 0.0) break;
  }
  return got >= need;
}


/// Lagrangian dual route. For fixed multipliers the relaxed problem separates
/// per unit: P sits where marginal cost meets the supply price and y minimizes
/// a one-dimensional convex quadratic. Each row residual is monotone in its own
/// multiplier once the inner ones are re-optimized, so the multipliers are found
/// by nested safeguarded false position (floor outside capacity outside supply).
/// Units without a switching penalty or with flat marginal cost make the dual
/// nonsmooth; the route then reports failure and the caller falls back.
class DualSolver {
 public:
  DualSolver(const RelaxedProblem& pb, bool floor_active) : pb_(pb), floor_active_(floor_active) {
    for (const auto& m : pb.must_run) {
      mr_cap_max_ += m.cap_max;
      mr_cap_min_ += m.cap_min;
    }
    y_.resize(pb.units.size());
    p_.resize(pb.units.size());
    mp_.resize(pb.must_run.size());
  }

  bool solve(double tol) {
    tol_ = tol;
    ok_ = true;
    std::array<double, 3> mu{};
    if (floor_active_) {
      root(2, mu);
    } else {
      root(1, mu);
    }
    mu_ = mu;
    evaluate(mu_);
    return ok_;
  }

  const std::array<double, 3>& multipliers() const noexcept { return mu_; }
  const std::vector<double>& y() const noexcept { return y_; }
  const std::vector<double>& p() const noexcept { return p_; }
  const std::vector<double>& must_run_p() const noexcept { return mp_; }

 private:
  // Per-unit Lagrangian minimizers and the three raw rows.
  std::array<double, 3> evaluate(const std::array<double, 3>& mu) {
    double supply = 0.0, cap = mr_cap_max_, floor = mr_cap_min_;
    const double lam = mu[0];
    for (std::size_t i = 0; i < pb_.units.size(); ++i) {
      const auto& u = pb_.units[i];
      double p = u.lower;
      double e = lam * u.idle_supply + u.score_cost - mu[1] * u.cap_max + mu[2] * u.cap_min;
      if (u.produces) {
        if (u.cost.a > 0.0) {
          p = std::clamp((lam - u.cost.b) / (2.0 * u.cost.a), u.lower, u.upper);
        } else {
          p = lam > u.cost.b ? u.upper : u.lower;
        }
        e += u.cost(p) - lam * p;
      }
      double y;
      if (u.penalty > 0.0) {
        y = std::clamp(u.prev_status - e / (2.0 * u.penalty), 0.0, 1.0);
      } else {
        y = e < 0.0 ? 1.0 : 0.0;
      }
      y_[i] = y;
      p_[i] = p;
      if (u.produces) supply += y * p;
      supply += (1.0 - y) * u.idle_supply;
      cap += y * u.cap_max;
      floor += y * u.cap_min;
    }
    for (std::size_t m = 0; m < pb_.must_run.size(); ++m) {
      const auto& u = pb_.must_run[m];
      double p;
      if (u.cost.a > 0.0) {
        p = std::clamp((lam - u.cost.b) / (2.0 * u.cost.a), u.lower, u.upper);
      } else {
        p = lam > u.cost.b ? u.upper : u.lower;
      }
      mp_[m] = p;
      supply += p;
    }
    return {supply - pb_.demand, cap - pb_.capacity_target, floor_active_ ? pb_.floor_target - floor : 0.0};
  }

  double scale(int row) const noexcept {
    const double rhs = row == 0 ? pb_.demand : row == 1 ? pb_.capacity_target : pb_.floor_target;
    return std::max(1.0, std::abs(rhs));
  }

  // Residual of `row` with all inner multipliers re-solved.
  double residual(int row, std::array<double, 3>& mu) {
    if (row > 0) root(row - 1, mu);
    return evaluate(mu)[row];
  }

  // Sets mu[row] to the root of its increasing residual (or zero when the row
  // is slack at zero).
  void root(int row, std::array<double, 3>& mu) {
    const double ftol = 0.01 * tol_ * scale(row);
    mu[row] = 0.0;
    double flo = residual(row, mu);
    if (flo >= -ftol || !ok_) return;
    double lo = 0.0, hi = 1.0, fhi;
    for (;;) {
      mu[row] = hi;
      fhi = residual(row, mu);
      if (!ok_) return;
      if (fhi >= 0.0) break;
      lo = hi;
      flo = fhi;
      hi *= 4.0;
      if (hi > 1e15) {
        ok_ = false;
        return;
      }
    }
    if (fhi <= ftol) return;
    int side = 0;
    for (int it = 0; it < 300; ++it) {
      double x = (lo * fhi - hi * flo) / (fhi - flo);
      if (!(x > lo && x < hi) || it % 4 == 3) x = 0.5 * (lo + hi);
      mu[row] = x;
      const double fx = residual(row, mu);
      if (!ok_) return;
      if (std::abs(fx) <= ftol) return;
      if (fx < 0.0) {
        lo = x;
        flo = fx;
        if (side == -1) fhi *= 0.5;
        side = -1;
      } else {
        hi = x;
        fhi = fx;
        if (side == 1) flo *= 0.5;
        side = 1;
      }
      if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    }
    // Stalled on a jump of the residual; end on the feasible side.
    mu[row] = hi;
    residual(row, mu);
    ok_ = false;
  }

  const RelaxedProblem& pb_;
  bool floor_active_;
  bool ok_ = true;
  double tol_ = 1e-6;
  double mr_cap_max_ = 0.0, mr_cap_min_ = 0.0;
  std::array<double, 3> mu_{};
  std::vector<double> y_, p_, mp_;
};

}  // namespace detail

/// KKT residual of `sol` as defined for RelaxedSolution::kkt_residual.
inline double relaxed_kkt_residual(const RelaxedProblem& pb, const RelaxedSolution& sol) {
  detail::RelaxedModel model(pb, sol.floor_active);
  const std::size_t nd = pb.units.size();
  std::vector<double> z(model.size());
  for (std::size_t i = 0; i < nd; ++i) {
    const auto& u = pb.units[i];
    z[i] = sol.y[i];
    z[nd + i] = u.upper > u.lower ? (sol.p[i] - u.lower) / (u.upper - u.lower) : 0.0;
  }
  for (std::size_t m = 0; m < pb.must_run.size(); ++m) {
    const auto& u = pb.must_run[m];
    z[2 * nd + m] = u.upper > u.lower ? (sol.must_run_p[m] - u.lower) / (u.upper - u.lower) : 0.0;
  }
  std::vector<double> scratch;
  return detail::kkt_residual(model, z, sol.multipliers, scratch);
}

/// Stationary point of the relaxed commitment problem. The separable dual route
/// is tried first; when it cannot certify a KKT point the bound-projected
/// augmented Lagrangian runs from y = 0.5, P at mid-range, with a nonmonotone
/// spectral projected gradient inner solver on the unit box.
inline RelaxedSolution solve_relaxed(const RelaxedProblem& pb, const RelaxConfig& cfg = {}) {
  RelaxedSolution sol;
  const std::size_t nd = pb.units.size();
  const std::size_t nm = pb.must_run.size();
  for (const auto& u : pb.units)
    if (!(u.lower <= u.upper) || u.penalty < 0.0 || u.cap_min > u.cap_max)
      throw ArgumentError("malformed relaxed unit");

  // Relaxed infeasibility: even full commitment misses a demand-side row.
  double max_supply = 0.0, max_cap = 0.0;
  for (const auto& u : pb.units) {
    max_supply += std::max(u.produces ? u.upper : 0.0, u.idle_supply);
    max_cap += u.cap_max;
  }
  for (const auto& m : pb.must_run) {
    max_supply += m.upper;
    max_cap += m.cap_max;
  }
  if (max_supply < pb.demand || max_cap < pb.capacity_target) {
    sol.status = RelaxStatus::infeasible;
    sol.y.assign(nd, 0.0);
    sol.p.resize(nd);
    for (std::size_t i = 0; i < nd; ++i) sol.p[i] = pb.units[i].lower;
    for (const auto& m : pb.must_run) sol.must_run_p.push_back(m.upper);
    return sol;
  }
  sol.floor_active = std::isfinite(pb.floor_target) && detail::capacity_and_floor_compatible(pb);

  detail::DualSolver dual(pb, sol.floor_active);
  if (dual.solve(cfg.tol)) {
    sol.y = dual.y();
    sol.p = dual.p();
    sol.must_run_p = dual.must_run_p();
    sol.multipliers = dual.multipliers();
    sol.kkt_residual = relaxed_kkt_residual(pb, sol);
    if (sol.kkt_residual <= cfg.tol) {
      sol.objective = 0.0;
      for (std::size_t i = 0; i < nd; ++i) {
        const auto& u = pb.units[i];
        const double dy = sol.y[i] - u.prev_status;
        sol.objective += (u.produces ? sol.y[i] * u.cost(sol.p[i]) : 0.0) + u.penalty * dy * dy +
                         u.score_cost * sol.y[i];
      }
      for (std::size_t m = 0; m < nm; ++m) sol.objective += pb.must_run[m].cost(sol.must_run_p[m]);
      sol.status = RelaxStatus::converged;
      return sol;
    }
  }

  detail::RelaxedModel model(pb, sol.floor_active);
  const std::size_t n = model.size();
  std::vector<double> z(n, 0.5), grad(n), zt(n), gt(n), scratch;
  const int rows = sol.floor_active ? 3 : 2;

  std::array<double, 3> g{};
  const double fscale = 1.0 + std::abs(model.evaluate(z, g));
  std::array<double, 3> lambda{};  // multipliers of the scaled rows
  double rho = 10.0;

  // Scaled augmented Lagrangian (PHR form) and its gradient.
  auto al_eval = [&](std::span<const double> x, std::span<double> gr) {
    std::array<double, 3> gx{};
    const double f = model.evaluate(x, gx);
    double val = f / fscale;
    std::array<double, 3> w{};
    for (int j = 0; j < rows; ++j) {
      const double gj = gx[j] / model.row_scale(j);
      const double pi = std::max(0.0, lambda[j] - rho * gj);
      val += (pi * pi - lambda[j] * lambda[j]) / (2.0 * rho);
      w[j] = pi * fscale / model.row_scale(j);
    }
    model.lagrangian_gradient(x, w, gr);
    for (double& v : gr) v /= fscale;
    return val;
  };
  auto dot = [](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
  };
  auto multipliers_dollars = [&]() {
    std::array<double, 3> mu{};
    for (int j = 0; j < rows; ++j) mu[j] = lambda[j] * fscale / model.row_scale(j);
    return mu;
  };

  double inner_tol = 1e-2;
  double prev_violation = std::numeric_limits<double>::infinity();
  double best_kkt = std::numeric_limits<double>::infinity();
  int stalled = 0;  // outer iterations without halving the residual
  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    sol.outer_iterations = outer + 1;
    // Spectral projected gradient on the current subproblem.
    double val = al_eval(z, grad);
    double alpha = 1.0 / std::max(detail::projected_step_norm(z, grad, 1.0), 1e-12);
    std::deque<double> history{val};
    for (int it = 0; it < cfg.max_inner; ++it) {
      if (detail::projected_step_norm(z, grad, 1.0) <= inner_tol) break;
      ++sol.inner_iterations;
      std::vector<double>& d = scratch;
      d.resize(n);
      for (std::size_t k = 0; k < n; ++k) d[k] = std::clamp(z[k] - alpha * grad[k], 0.0, 1.0) - z[k];
      const double slope = dot(grad, d);
      if (slope >= 0.0) break;
      const double ref = *std::max_element(history.begin(), history.end());
      double t = 1.0, vt = 0.0;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t k = 0; k < n; ++k) zt[k] = z[k] + t * d[k];
        vt = al_eval(zt, gt);
        if (vt <= ref + 1e-4 * t * slope) break;
        const double denom = 2.0 * (vt - val - t * slope);
        const double tq = denom > 0.0 ? -slope * t * t / denom : 0.5 * t;
        t = std::clamp(tq, 0.1 * t, 0.5 * t);
      }
      double ss = 0.0, sy = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double sk = zt[k] - z[k];
        ss += sk * sk;
        sy += sk * (gt[k] - grad[k]);
      }
      alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 1e12;
      z.swap(zt);
      grad.swap(gt);
      val = vt;
      history.push_back(val);
      if (history.size() > 10) history.pop_front();
      if (ss == 0.0) break;
    }

    model.evaluate(z, g);
    double violation = 0.0;
    for (int j = 0; j < rows; ++j) {
      const double gj = g[j] / model.row_scale(j);
      violation = std::max(violation, std::abs(std::min(gj, lambda[j] / rho)));
      lambda[j] = std::max(0.0, lambda[j] - rho * gj);
    }
    sol.kkt_residual = detail::kkt_residual(model, z, multipliers_dollars(), gt);
    if (sol.kkt_residual <= cfg.tol) {
      sol.status = RelaxStatus::converged;
      break;
    }
    if (sol.kkt_residual < 0.5 * best_kkt) {
      best_kkt = sol.kkt_residual;
      stalled = 0;
    } else if (++stalled >= cfg.max_stalled) {
      break;
    }
    if (violation > 0.25 * prev_violation) rho = std::min(rho * 10.0, 1e10);
    prev_violation = violation;
    inner_tol = std::max(0.1 * inner_tol, 0.01 * cfg.tol);
  }

  sol.multipliers = multipliers_dollars();
  sol.objective = model.evaluate(z, g);
  sol.y.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(nd));
  sol.p.resize(nd);
  for (std::size_t i = 0; i < nd; ++i) sol.p[i] = model.power(z, i);
  sol.must_run_p.resize(nm);
  for (std::size_t m = 0; m < nm; ++m) sol.must_run_p[m] = model.must_run_power(z, m);
  return sol;
}

/// Permutation of discretionary positions: descending score, ties (|dy| < 1e-9)
/// by ascending average cost at p_typ, then ascending id. With `fallback` the
/// scores are ignored and the result is the plain priority list.
inline std::vector<std::size_t> order_candidates(std::span<const double> scores,
                                                 std::span<const GeneratorSpec* const> specs,
                                                 bool fallback) {
  const std::size_t n = specs.size();
  if (!fallback && scores.size() != n) throw ArgumentError("one score per candidate required");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto cheaper = [&](std::size_t a, std::size_t b) {
    const double ca = specs[a]->average_cost_at_typ(), cb = specs[b]->average_cost_at_typ();
    if (ca != cb) return ca < cb;
    return specs[a]->id < specs[b]->id;
  };
  if (fallback) {
    std::sort(order.begin(), order.end(), cheaper);
    return order;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  // Runs of scores chained within 1e-9 are ties.
  std::size_t start = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k == n || scores[order[k - 1]] - scores[order[k]] >= 1e-9) {
      std::sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                order.begin() + static_cast<std::ptrdiff_t>(k), cheaper);
      start = k;
    }
  }
  return order;
}

inline std::vector<std::size_t> order_candidates(const RelaxedSolution& sol,
                                                 std::span<const GeneratorSpec* const> specs,
                                                 bool fallback) {
  return order_candidates(sol.y, specs, fallback || sol.status != RelaxStatus::converged);
}

}  // namespace rruc
