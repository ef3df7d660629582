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

// Independent reference computations used by the unit and acceptance suites.
// Nothing here calls into the solver paths it is used to check.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

#include "rruc/dispatch.hpp"
#include "rruc/random.hpp"
#include "rruc/relaxation.hpp"

namespace rruc::testing {

// ---------------------------------------------------------------- quadratic fit

/// Normal equations of the least-squares quadratic, solved by explicit 3x3
/// Gaussian elimination with partial pivoting. Abscissae are rescaled to
/// [-1, 1] first; that is a change of variables, not a different method.
inline std::array<double, 3> normal_equation_fit(const std::vector<std::pair<double, double>>& pts,
                                                 bool linear_only = false) {
  long double scale = 0;
  for (auto& [x, y] : pts) scale = std::max<long double>(scale, std::fabs(x));
  const int n = linear_only ? 2 : 3;
  long double M[3][4] = {};
  for (auto& [x0, y] : pts) {
    const long double x = x0 / scale;
    long double basis[3] = {x * x, x, 1};
    const long double* b = linear_only ? basis + 1 : basis;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) M[r][c] += b[r] * b[c];
      M[r][3] += b[r] * y;
    }
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
    for (int c = 0; c < 4; ++c) std::swap(M[col][c], M[piv][c]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const long double f = M[r][col] / M[col][col];
      for (int c = col; c < 4; ++c) M[r][c] -= f * M[col][c];
    }
  }
  long double sol[3];
  for (int r = 0; r < n; ++r) sol[r] = M[r][3] / M[r][r];
  if (linear_only) return {0.0, static_cast<double>(sol[0] / scale), static_cast<double>(sol[1])};
  return {static_cast<double>(sol[0] / (scale * scale)), static_cast<double>(sol[1] / scale),
          static_cast<double>(sol[2])};
}

// ------------------------------------------------------------ dispatch oracle

struct GridDispatch {
  std::vector<double> outputs;
  double lambda = 0.0;
  double objective = 0.0;
};

/// Dense grid search on a 0.01 MW lattice: starting from the lower bounds,
/// repeatedly give one grid step to the unit whose cost rises least until
/// demand is met. For separable convex costs the greedy allocation is the
/// exact minimiser over the lattice.
inline GridDispatch grid_search_dispatch(const std::vector<DispatchUnit>& units, double demand,
                                         double step = 0.01) {
  GridDispatch out;
  out.outputs.resize(units.size());
  double total = 0.0;
  for (std::size_t j = 0; j < units.size(); ++j) {
    out.outputs[j] = units[j].lower;
    total += units[j].lower;
  }
  using Item = std::pair<double, std::size_t>;
  auto increment = [&](std::size_t j) {
    const double p = out.outputs[j];
    const double next = std::min(p + step, units[j].upper);
    return units[j].cost(next) - units[j].cost(p);
  };
  auto cmp = [](const Item& a, const Item& b) {
    return a.first != b.first ? a.first > b.first : a.second > b.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
  for (std::size_t j = 0; j < units.size(); ++j)
    if (units[j].upper > units[j].lower) heap.push({increment(j), j});
  std::size_t last = units.size();
  while (total < demand - 1e-9 && !heap.empty()) {
    const auto [inc, j] = heap.top();
    heap.pop();
    const double next = std::min(out.outputs[j] + step, units[j].upper);
    total += next - out.outputs[j];
    out.outputs[j] = next;
    last = j;
    if (out.outputs[j] < units[j].upper) heap.push({increment(j), j});
  }
  if (last < units.size()) out.lambda = units[last].cost.marginal(out.outputs[last]);
  for (std::size_t j = 0; j < units.size(); ++j)
    out.objective += units[j].cost(out.outputs[j]) + units[j].start_penalty;
  return out;
}

/// Heterogeneous quadratic units with base-fleet magnitudes and an
/// interior demand.
inline DispatchProblem random_dispatch_problem(SplitMix& rng, int n_units) {
  DispatchProblem pb;
  double lo = 0.0, hi = 0.0;
  for (int j = 0; j < n_units; ++j) {
    const double pmax = rng.uniform(20.0, 400.0);
    const double pmin = pmax * rng.uniform(0.2, 0.5);
    DispatchUnit u;
    u.cost = {rng.uniform(1.0, 6.0) / pmax, rng.uniform(15.0, 60.0), pmax * rng.uniform(1.0, 8.0)};
    u.lower = pmin;
    u.upper = pmax;
    pb.units.push_back(u);
    lo += pmin;
    hi += pmax;
  }
  pb.demand = lo + rng.uniform(0.1, 0.9) * (hi - lo);
  return pb;
}

// ---------------------------------------------------------- relaxation oracle

/// Objective and raw rows of the relaxed problem, written from the model
/// definition (not from the solver's evaluator). Coordinates are the unit box
/// z = [y, s, s_mr] with P = lower + s (upper - lower).
inline double relaxed_objective_rows(const RelaxedProblem& pb, bool floor_active,
                                     const std::vector<double>& z, std::array<double, 3>& rows) {
  const std::size_t nd = pb.units.size();
  double f = 0, supply = 0, cap = 0, floor = 0;
  for (std::size_t i = 0; i < nd; ++i) {
    const auto& u = pb.units[i];
    const double y = z[i];
    const double P = u.lower + z[nd + i] * (u.upper - u.lower);
    if (u.produces) {
      f += y * (u.cost.a * P * P + u.cost.b * P + u.cost.c);
      supply += y * P;
    }
    f += u.penalty * (y - u.prev_status) * (y - u.prev_status) + u.score_cost * y;
    supply += (1 - y) * u.idle_supply;
    cap += y * u.cap_max;
    floor += y * u.cap_min;
  }
  for (std::size_t m = 0; m < pb.must_run.size(); ++m) {
    const auto& u = pb.must_run[m];
    const double P = u.lower + z[2 * nd + m] * (u.upper - u.lower);
    f += u.cost.a * P * P + u.cost.b * P + u.cost.c;
    supply += P;
    cap += u.cap_max;
    floor += u.cap_min;
  }
  rows = {supply - pb.demand, cap - pb.capacity_target, floor_active ? pb.floor_target - floor : 0.0};
  return f;
}

/// KKT residual of a relaxed solution with every gradient taken by central
/// differences (h = 1e-5 on the unit box, one-sided at the box faces).
inline double finite_difference_kkt(const RelaxedProblem& pb, const RelaxedSolution& sol) {
  const std::size_t nd = pb.units.size();
  std::vector<double> z(2 * nd + pb.must_run.size());
  for (std::size_t i = 0; i < nd; ++i) {
    const auto& u = pb.units[i];
    z[i] = sol.y[i];
    z[nd + i] = u.upper > u.lower ? (sol.p[i] - u.lower) / (u.upper - u.lower) : 0.0;
  }
  for (std::size_t m = 0; m < pb.must_run.size(); ++m) {
    const auto& u = pb.must_run[m];
    z[2 * nd + m] = u.upper > u.lower ? (sol.must_run_p[m] - u.lower) / (u.upper - u.lower) : 0.0;
  }
  const bool fl = sol.floor_active;
  const auto& mu = sol.multipliers;
  auto lagrangian = [&](const std::vector<double>& x) {
    std::array<double, 3> g{};
    const double f = relaxed_objective_rows(pb, fl, x, g);
    return f - mu[0] * g[0] - mu[1] * g[1] - (fl ? mu[2] * g[2] : 0.0);
  };
  std::array<double, 3> g{};
  const double f = relaxed_objective_rows(pb, fl, z, g);
  const double fs = 1.0 + std::abs(f);
  const double h = 1e-5;
  double r = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    auto xp = z, xm = z;
    const double up = std::min(1.0, z[k] + h), dn = std::max(0.0, z[k] - h);
    xp[k] = up;
    xm[k] = dn;
    const double grad = (lagrangian(xp) - lagrangian(xm)) / (up - dn);
    r = std::max(r, std::abs(std::clamp(z[k] - grad / fs, 0.0, 1.0) - z[k]));
  }
  const double scales[3] = {std::max(1.0, std::abs(pb.demand)), std::max(1.0, std::abs(pb.capacity_target)),
                            std::max(1.0, std::abs(pb.floor_target))};
  for (int j = 0; j < (fl ? 3 : 2); ++j) {
    r = std::max(r, std::max(0.0, -g[j]) / scales[j]);
    r = std::max(r, mu[j] * std::abs(g[j]) / fs);
  }
  return r;
}

/// Random single-period runtime-model relaxation with feasible rows.
/// `hours` scales hourly costs to one period.
inline RelaxedProblem random_relaxed_problem(SplitMix& rng, int n_disc, int n_must, double hours = 1.0) {
  RelaxedProblem pb;
  double cap_all = 0.0, r = 0.0, pmin_must = 0.0, pmin_all = 0.0;
  for (int i = 0; i < n_disc + n_must; ++i) {
    const double pmax = rng.uniform(50.0, 500.0);
    const double pmin = pmax * rng.uniform(0.2, 0.5);
    const CostCurve cost =
        CostCurve{rng.uniform(1.0, 6.0) / pmax, rng.uniform(15.0, 60.0), pmax * rng.uniform(1.0, 8.0)}.scaled(hours);
    cap_all += pmax;
    pmin_all += pmin;
    r = std::max(r, pmax);
    if (i < n_disc) {
      RelaxedUnit u;
      u.cost = cost;
      u.lower = pmin;
      u.upper = pmax;
      u.cap_max = pmax;
      u.cap_min = pmin;
      u.penalty = pmax * rng.uniform(5.0, 40.0) * 0.75;
      u.prev_status = rng.unit() < 0.5 ? 1.0 : 0.0;
      pb.units.push_back(u);
    } else {
      pb.must_run.push_back({cost, pmin, pmax, pmax, pmin});
      pmin_must += pmin;
    }
  }
  pb.demand = rng.uniform(0.35, 0.6) * cap_all;
  pb.capacity_target = std::min(0.95 * cap_all, 1.05 * pb.demand + r);
  pb.floor_target = std::max(pmin_must + 1.0, std::min(0.9 * pb.demand, 0.8 * pmin_all + pmin_must));
  return pb;
}

}  // namespace rruc::testing
