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
#include <cstdint>
#include <string>
#include <span>
#include <vector>

#include "rruc/dispatch.hpp"
#include "rruc/error.hpp"
#include "rruc/random.hpp"
#include "rruc/rruc_core.hpp"

namespace rruc {

inline constexpr std::size_t kOracleMaxUnits = 20;

/// A commitment of the discretionary candidates judged the way the sweep judges
/// a prefix: capacity row with the committed set's own R, floor row, demand,
/// dispatch cost plus K for every newly started unit.
struct CommitmentValue {
  bool feasible = false;
  double objective = 0.0;
};

inline CommitmentValue evaluate_commitment(const UcInstance& inst, std::span<const std::uint8_t> committed) {
  if (committed.size() != inst.discretionary.size()) throw ArgumentError("commitment size mismatch");
  std::vector<DispatchUnit> units;
  double cap = 0.0, floor = 0.0, r = 0.0, penalties = 0.0;
  for (const auto& g : inst.must_run) {
    units.push_back({g.cost.scaled(inst.period_hours), g.p_min, g.p_max, 0.0});
    cap += g.p_max;
    floor += g.p_min;
    r = std::max(r, g.p_max);
  }
  for (std::size_t i = 0; i < committed.size(); ++i) {
    const auto& c = inst.discretionary[i];
    const int u = committed[i] ? 1 : 0;
    if (!u) continue;
    if (!c.prev_status) penalties += c.penalty;
    units.push_back({c.spec.cost.scaled(inst.period_hours), c.spec.p_min, c.spec.p_max, 0.0});
    cap += c.spec.p_max;
    floor += c.spec.p_min;
    r = std::max(r, c.spec.p_max);
  }
  CommitmentValue v;
  const auto& fw = inst.window;
  if (cap < fw.d_max_72 + 3.0 * fw.sigma_d + r || floor > fw.d_min_72 - fw.sigma_d) return v;
  if (units.empty()) {
    v.feasible = inst.demand <= 0.0;
    v.objective = penalties;
    return v;
  }
  const Dispatch d = economic_dispatch(units, inst.demand);
  v.feasible = d.feasible;
  v.objective = d.objective + penalties;
  return v;
}

struct OracleResult {
  std::vector<std::size_t> best_commitment;  // discretionary indices, ascending
  double best_objective = 0.0;
  std::size_t evaluated = 0;
  bool feasible = false;
};

/// Exhaustive enumeration of every discretionary subset. Equal objectives go to
/// the lexicographically smallest index set.
inline OracleResult exhaustive_uc(const UcInstance& inst) {
  const std::size_t n = inst.discretionary.size();
  if (n > kOracleMaxUnits) throw ArgumentError("exhaustive oracle is capped at 20 discretionary units");
  OracleResult best;
  std::vector<std::uint8_t> u(n);
  std::vector<std::size_t> set;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    set.clear();
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = (mask >> i) & 1u;
      if (u[i]) set.push_back(i);
    }
    ++best.evaluated;
    const CommitmentValue v = evaluate_commitment(inst, u);
    if (!v.feasible) continue;
    if (!best.feasible || v.objective < best.best_objective ||
        (v.objective == best.best_objective && set < best.best_commitment)) {
      best.feasible = true;
      best.best_objective = v.objective;
      best.best_commitment = set;
    }
  }
  return best;
}

/// Relative gap (candidate - best) / best.
inline double gap(double candidate_objective, const OracleResult& oracle) {
  if (!oracle.feasible || !(oracle.best_objective > 0.0))
    throw UndefinedGapError("gap needs a feasible oracle with positive objective");
  return (candidate_objective - oracle.best_objective) / oracle.best_objective;
}

/// Random single-period instance for oracle comparisons: hourly costs, demand
/// between 35% and 60% of installed capacity, forecast band around it.
inline UcInstance random_uc_instance(SplitMix& rng, std::size_t n_discretionary, std::size_t n_must_run = 0) {
  UcInstance inst;
  double total = 0.0;
  auto draw = [&](std::size_t i) {
    GeneratorSpec g;
    g.id = "g" + std::to_string(i);
    g.p_max = rng.uniform(50.0, 400.0);
    g.p_min = g.p_max * rng.uniform(0.2, 0.5);
    g.cost = {rng.uniform(1.0, 6.0) / g.p_max, rng.uniform(15.0, 60.0), g.p_max * rng.uniform(1.0, 8.0)};
    g.ramp_up_rate = g.ramp_down_rate = 0.05 * g.p_max;
    g.start_costs = {g.p_max * 10.0, g.p_max * 15.0, g.p_max * 18.0};
    g.shutdown_cost = 0.5 * g.start_costs.hot;
    total += g.p_max;
    return g;
  };
  for (std::size_t i = 0; i < n_must_run; ++i) inst.must_run.push_back(draw(i));
  for (std::size_t i = 0; i < n_discretionary; ++i) {
    UcCandidate c;
    c.spec = draw(n_must_run + i);
    c.penalty = c.spec.p_max * rng.uniform(5.0, 40.0);
    c.prev_status = rng.unit() < 0.5 ? 1 : 0;
    inst.discretionary.push_back(std::move(c));
  }
  inst.demand = total * rng.uniform(0.35, 0.6);
  inst.window.d_now = inst.demand;
  inst.window.d_max_72 = inst.demand * rng.uniform(1.0, 1.15);
  inst.window.d_min_72 = inst.demand * rng.uniform(0.55, 0.9);
  inst.window.sigma_d = 0.01 * total;
  return inst;
}

struct OracleComparison {
  std::vector<double> gaps;  // one per compared instance
  double max_gap = 0.0;
  double median_gap = 0.0;
  std::size_t floor_flagged = 0;  // sweep commitment breaks the floor row
  std::size_t emergency = 0;
  std::size_t skipped = 0;        // drawn instances with no feasible commitment at all
  std::size_t oracle_evaluations = 0;
};

/// Draws random instances until `instances` of them have a feasible optimum and
/// compares the relax-and-round objective against exhaustive enumeration.
inline OracleComparison compare_with_oracle(std::size_t units, std::size_t instances, std::uint64_t seed,
                                            const RelaxConfig& relax = {}, const SweepOptions& sweep = {}) {
  if (units == 0 || units > kOracleMaxUnits) throw ArgumentError("oracle comparison needs 1..20 units");
  SplitMix rng(seed);
  OracleComparison out;
  while (out.gaps.size() < instances) {
    const UcInstance inst = random_uc_instance(rng, units);
    const OracleResult best = exhaustive_uc(inst);
    if (!best.feasible) {
      if (++out.skipped > 100 * instances + 100) throw ArgumentError("instance generator keeps producing infeasible cases");
      continue;
    }
    const RrucSolution sol = solve_rruc(inst, relax, sweep);
    out.oracle_evaluations += best.evaluated;
    out.floor_flagged += sol.range.floor_violated ? 1 : 0;
    out.emergency += sol.sweep.emergency ? 1 : 0;
    out.gaps.push_back(gap(sol.sweep.objective, best));
  }
  if (!out.gaps.empty()) {
    std::vector<double> sorted = out.gaps;
    std::sort(sorted.begin(), sorted.end());
    out.max_gap = sorted.back();
    const std::size_t m = sorted.size() / 2;
    out.median_gap = sorted.size() % 2 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
  }
  return out;
}

}  // namespace rruc
