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
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "rruc/error.hpp"
#include "rruc/fleet.hpp"

namespace rruc {

/// One committed unit in an economic dispatch. `start_penalty` is added to the
/// objective unconditionally (zero for units that were already on).
struct DispatchUnit {
  CostCurve cost;
  double lower = 0.0;
  double upper = 0.0;
  double start_penalty = 0.0;
};

struct DispatchProblem {
  std::vector<DispatchUnit> units;
  double demand = 0.0;
};

struct Dispatch {
  std::vector<double> outputs;
  double lambda = 0.0;
  double objective = 0.0;
  bool feasible = false;
};

namespace detail {

inline double unit_supply(const DispatchUnit& u, double lambda) noexcept {
  if (u.cost.a > 0.0) return std::clamp((lambda - u.cost.b) / (2.0 * u.cost.a), u.lower, u.upper);
  return lambda > u.cost.b ? u.upper : u.lower;
}

inline double total_supply(std::span<const DispatchUnit> units, double lambda) noexcept {
  double s = 0.0;
  for (const auto& u : units) s += unit_supply(u, lambda);
  return s;
}

inline double dispatch_objective(std::span<const DispatchUnit> units, std::span<const double> p) noexcept {
  double obj = 0.0;
  for (std::size_t j = 0; j < units.size(); ++j) obj += units[j].cost(p[j]) + units[j].start_penalty;
  return obj;
}

}  // namespace detail

/// Supply of the clamped marginal-cost curves at price `lambda`.
inline double supply_at(std::span<const DispatchUnit> units, double lambda) noexcept {
  return detail::total_supply(units, lambda);
}

/// Least-cost outputs for a fixed committed set meeting `demand`.
///
/// The demand row is an inequality, so when the lower bounds alone cover
/// demand every unit sits at its floor and lambda is zero. Otherwise lambda is
/// bisected on the clamped supply curve until supply matches demand; units
/// with a flat marginal cost (a == 0) that are marginal at the final price
/// absorb the residual in index order.
inline Dispatch economic_dispatch(std::span<const DispatchUnit> units, double demand) {
  if (units.empty()) throw ArgumentError("economic dispatch needs at least one unit");
  if (!(demand >= 0.0)) throw ArgumentError("demand must be non-negative");
  double sum_lo = 0.0, sum_hi = 0.0;
  for (const auto& u : units) {
    if (!(u.lower <= u.upper)) throw ArgumentError("dispatch unit has lower > upper");
    sum_lo += u.lower;
    sum_hi += u.upper;
  }

  Dispatch out;
  out.outputs.resize(units.size());
  if (sum_hi < demand) {
    double lam = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < units.size(); ++j) {
      out.outputs[j] = units[j].upper;
      lam = std::max(lam, units[j].cost.marginal(units[j].upper));
    }
    out.lambda = lam;
    out.objective = detail::dispatch_objective(units, out.outputs);
    out.feasible = false;
    return out;
  }
  out.feasible = true;
  if (sum_lo >= demand) {
    for (std::size_t j = 0; j < units.size(); ++j) out.outputs[j] = units[j].lower;
    out.lambda = 0.0;
    out.objective = detail::dispatch_objective(units, out.outputs);
    return out;
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& u : units) {
    lo = std::min(lo, u.cost.b);
    hi = std::max(hi, u.cost.marginal(u.upper));
  }
  lo -= 1.0;
  hi += 1.0;
  // Invariant: supply(lo) < demand <= supply(hi).
  double s_lo = detail::total_supply(units, lo);
  double s_hi = detail::total_supply(units, hi);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = detail::total_supply(units, mid);
    if (s >= demand) {
      hi = mid;
      s_hi = s;
    } else {
      lo = mid;
      s_lo = s;
    }
  }

  bool has_marginal_flat = false;
  for (const auto& u : units)
    if (u.cost.a == 0.0 && u.cost.b >= lo && u.cost.b < hi) has_marginal_flat = true;

  // Without a flat marginal unit supply is continuous on [lo, hi]; land on it exactly.
  double lambda = hi;
  if (!has_marginal_flat && s_hi > s_lo) lambda = lo + (demand - s_lo) / (s_hi - s_lo) * (hi - lo);

  double supplied = 0.0;
  for (std::size_t j = 0; j < units.size(); ++j) {
    const auto& u = units[j];
    if (u.cost.a == 0.0 && u.cost.b >= lo && u.cost.b < hi)
      out.outputs[j] = u.lower;
    else
      out.outputs[j] = detail::unit_supply(u, lambda);
    supplied += out.outputs[j];
  }
  double residual = demand - supplied;
  for (std::size_t j = 0; j < units.size() && residual > 0.0; ++j) {
    const auto& u = units[j];
    if (!(u.cost.a == 0.0 && u.cost.b >= lo && u.cost.b < hi)) continue;
    const double take = std::min(residual, u.upper - u.lower);
    out.outputs[j] += take;
    residual -= take;
  }
  out.lambda = lambda;
  out.objective = detail::dispatch_objective(units, out.outputs);
  return out;
}

inline Dispatch economic_dispatch(const DispatchProblem& problem) {
  return economic_dispatch(problem.units, problem.demand);
}

/// Stationarity check for a dispatch: interior units sit at marginal cost
/// lambda, units at a bound have a correctly signed bound multiplier, and the
/// demand row holds (with equality while lambda is positive).
inline bool verify_kkt_dispatch(const DispatchProblem& problem, const Dispatch& dispatch, double tol) {
  const auto& units = problem.units;
  if (!dispatch.feasible || dispatch.outputs.size() != units.size()) return false;
  const double price_tol = tol * std::max(1.0, std::abs(dispatch.lambda));
  double total = 0.0, floor = 0.0;
  for (std::size_t j = 0; j < units.size(); ++j) {
    const auto& u = units[j];
    const double p = dispatch.outputs[j];
    const double band = tol * std::max(1.0, u.upper - u.lower);
    if (p < u.lower - band || p > u.upper + band) return false;
    total += p;
    floor += u.lower;
    const double mc = u.cost.marginal(p);
    const bool at_lower = p <= u.lower + band;
    const bool at_upper = p >= u.upper - band;
    if (at_lower && at_upper) continue;
    if (at_lower) {
      if (mc < dispatch.lambda - price_tol) return false;
    } else if (at_upper) {
      if (mc > dispatch.lambda + price_tol) return false;
    } else if (std::abs(mc - dispatch.lambda) > price_tol) {
      return false;
    }
  }
  const double target = std::max(problem.demand, floor);
  const double balance_tol = tol * std::max(1.0, problem.demand);
  if (dispatch.lambda > price_tol) return std::abs(total - target) <= balance_tol;
  return total >= problem.demand - balance_tol;
}

}  // namespace rruc
