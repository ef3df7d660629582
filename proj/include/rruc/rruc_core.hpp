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
#include <atomic>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include "rruc/demand.hpp"
#include "rruc/dispatch.hpp"
#include "rruc/error.hpp"
#include "rruc/fleet.hpp"
#include "rruc/relaxation.hpp"

namespace rruc {

enum class Stage : std::uint8_t { off, prepare, ramp_up, on, ramp_down };

inline std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::off: return "off";
    case Stage::prepare: return "prepare";
    case Stage::ramp_up: return "ramp_up";
    case Stage::on: return "on";
    case Stage::ramp_down: return "ramp_down";
  }
  return "?";
}

inline constexpr std::size_t kUnlimitedWidth = std::numeric_limits<std::size_t>::max();

/// Committed counts include the must-run units.
struct CommitRange {
  std::size_t m = 0;
  std::size_t m_max = 0;
  std::size_t must_run = 0;
  double reserve_r = 0.0;           // R at the minimum prefix
  bool capacity_shortfall = false;  // no prefix meets the capacity row
  bool floor_violated = false;      // m exceeds the floor limit
  std::size_t width() const noexcept { return m_max - m + 1; }
};

/// Capacity and floor data for a commit-range search, in candidate order.
struct RangeInput {
  std::size_t must_run_count = 0;
  double must_run_cap_max = 0.0;
  double must_run_cap_min = 0.0;
  double must_run_reserve = 0.0;  // largest must-run p_max
  std::vector<double> cap_max;    // per ordered candidate
  std::vector<double> cap_min;
  double capacity_rhs = 0.0;  // demand side of the capacity row, before R
  double floor_rhs = 0.0;
  std::size_t max_width = kUnlimitedWidth;
};

struct PeriodDiagnostics {
  RelaxStatus relax_status = RelaxStatus::converged;
  double relax_kkt = 0.0;
  bool fallback_order = false;
  std::size_t sweep_width = 0;
  std::size_t evaluated = 0;
  bool capacity_shortfall = false;
  bool floor_violated = false;
  bool emergency = false;
  double shortfall = 0.0;  // MW of unmet demand
};

/// Outcome of one period. `stages` is the stage each unit holds after the
/// decision; outputs include uncontrollable ramping output.
struct PeriodDecision {
  int period = 0;
  std::vector<std::uint8_t> committed;
  std::vector<std::uint8_t> starting;
  std::vector<std::uint8_t> stopping;
  std::vector<double> outputs;
  std::vector<Stage> stages;
  double objective = 0.0;
  double lambda = 0.0;
  std::size_t k_selected = 0;
  PeriodDiagnostics diagnostics;
};

/// Largest p_max over the admissible units.
inline double reserve_margin(std::span<const GeneratorSpec* const> admissible) {
  if (admissible.empty()) throw ArgumentError("reserve margin of an empty unit set");
  double r = 0.0;
  for (const auto* g : admissible) r = std::max(r, g->p_max);
  return r;
}

/// R for each nonempty prefix of `p_max`, starting from the must-run maximum.
inline std::vector<double> prefix_reserve(double must_run_max, std::span<const double> p_max) {
  std::vector<double> out;
  out.reserve(p_max.size());
  double r = must_run_max;
  for (double p : p_max) {
    r = std::max(r, p);
    out.push_back(r);
  }
  return out;
}

inline CommitRange find_commit_range(const RangeInput& in) {
  if (in.cap_max.size() != in.cap_min.size()) throw ArgumentError("range input size mismatch");
  const std::size_t n = in.cap_max.size();
  CommitRange range;
  range.must_run = in.must_run_count;

  std::size_t m_tilde = n;
  double cap = in.must_run_cap_max, r = in.must_run_reserve;
  bool found = cap >= in.capacity_rhs + r;
  double r_found = r;
  if (found) m_tilde = 0;
  for (std::size_t i = 0; i < n && !found; ++i) {
    cap += in.cap_max[i];
    r = std::max(r, in.cap_max[i]);
    if (cap >= in.capacity_rhs + r) {
      found = true;
      m_tilde = i + 1;
      r_found = r;
    }
  }
  range.capacity_shortfall = !found;
  range.reserve_r = found ? r_found : r;

  // Last prefix that still satisfies the floor row; the crossing unit is excluded.
  std::size_t m_tilde_max = 0;
  double floor = in.must_run_cap_min;
  for (std::size_t i = 0; i < n; ++i) {
    floor += in.cap_min[i];
    if (floor > in.floor_rhs) break;
    m_tilde_max = i + 1;
  }
  if (in.must_run_cap_min > in.floor_rhs) range.floor_violated = true;

  range.m = in.must_run_count + m_tilde;
  range.m_max = in.must_run_count + m_tilde_max;
  if (range.m > range.m_max) {
    range.m_max = range.m;
    range.floor_violated = true;
  }
  if (in.max_width != kUnlimitedWidth && in.max_width > 0 && range.width() > in.max_width)
    range.m_max = range.m + in.max_width - 1;
  return range;
}

/// Runtime-model range from specs: `ordered` are the discretionary candidates
/// in commit order.
inline CommitRange find_commit_range(std::span<const GeneratorSpec* const> ordered,
                                     std::span<const GeneratorSpec* const> must_run, const ForecastWindow& fw,
                                     std::size_t max_width = kUnlimitedWidth) {
  RangeInput in;
  in.must_run_count = must_run.size();
  for (const auto* g : must_run) {
    in.must_run_cap_max += g->p_max;
    in.must_run_cap_min += g->p_min;
    in.must_run_reserve = std::max(in.must_run_reserve, g->p_max);
  }
  for (const auto* g : ordered) {
    in.cap_max.push_back(g->p_max);
    in.cap_min.push_back(g->p_min);
  }
  in.capacity_rhs = fw.d_max_72 + 3.0 * fw.sigma_d;
  in.floor_rhs = fw.d_min_72 - fw.sigma_d;
  in.max_width = max_width;
  return find_commit_range(in);
}

/// A discretionary candidate as seen by the sweep. When selected it adds
/// `unit.start_penalty` and, if `produces`, joins the dispatch. When not
/// selected it adds `idle_penalty` and supplies `idle_supply` MW.
struct SweepCandidate {
  DispatchUnit unit;
  bool produces = true;
  double idle_penalty = 0.0;
  double idle_supply = 0.0;
};

struct SweepProblem {
  std::vector<DispatchUnit> must_run;
  std::vector<SweepCandidate> ordered;
  double demand = 0.0;
  CommitRange range;
  bool parallel = false;
};

struct SweepResult {
  std::size_t k = 0;  // total committed count
  std::vector<double> must_run_output;
  std::vector<double> ordered_output;  // zero where not dispatched
  double lambda = 0.0;
  double objective = 0.0;
  bool feasible = false;
  bool emergency = false;
  double shortfall = 0.0;
  std::size_t evaluated = 0;
};

/// Dispatch with the first `len` ordered candidates selected, from scratch.
inline SweepResult evaluate_prefix(const SweepProblem& pb, std::size_t len) {
  SweepResult res;
  res.k = pb.must_run.size() + len;
  std::vector<DispatchUnit> units(pb.must_run.begin(), pb.must_run.end());
  double demand = pb.demand, penalties = 0.0;
  for (std::size_t i = 0; i < pb.ordered.size(); ++i) {
    const auto& c = pb.ordered[i];
    if (i < len) {
      penalties += c.unit.start_penalty;
      if (c.produces) {
        units.push_back(c.unit);
        units.back().start_penalty = 0.0;
      }
    } else {
      penalties += c.idle_penalty;
      demand -= c.idle_supply;
    }
  }
  res.must_run_output.assign(pb.must_run.size(), 0.0);
  res.ordered_output.assign(pb.ordered.size(), 0.0);
  if (units.empty()) {
    res.feasible = demand <= 0.0;
    res.shortfall = std::max(0.0, demand);
    res.objective = penalties;
    return res;
  }
  const Dispatch d = economic_dispatch(units, demand);
  res.feasible = d.feasible;
  res.lambda = d.lambda;
  res.objective = d.objective + penalties;
  double total = 0.0;
  std::size_t j = 0;
  for (; j < pb.must_run.size(); ++j) {
    res.must_run_output[j] = d.outputs[j];
    total += d.outputs[j];
  }
  for (std::size_t i = 0; i < len; ++i) {
    if (!pb.ordered[i].produces) continue;
    res.ordered_output[i] = d.outputs[j++];
    total += res.ordered_output[i];
  }
  // Bisection leaves a residue far below any meaningful shortfall.
  const double gap = demand - total;
  res.shortfall = gap > 1e-6 * std::max(1.0, std::abs(demand)) ? gap : 0.0;
  return res;
}

namespace detail {

inline constexpr std::size_t kSweepChunk = 32;

struct PrefixValue {
  bool feasible = false;
  double objective = 0.0;
};

// Whether the incremental merit-order walk applies: every dispatched unit has
// a strictly convex cost, and selecting a candidate never lowers supply at a
// fixed price, so the clearing price is nonincreasing along the sweep.
inline bool walk_applies(const SweepProblem& pb) {
  for (const auto& u : pb.must_run)
    if (!(u.cost.a > 0.0)) return false;
  for (const auto& c : pb.ordered) {
    if (c.produces && !(c.unit.cost.a > 0.0)) return false;
    if (c.produces ? c.idle_supply > c.unit.lower : c.idle_supply > 0.0) return false;
  }
  return true;
}

// Objectives of prefixes len0..len1 by walking the sorted marginal-cost
// breakpoints downward as units are added. O(n log n) setup, then amortized
// O(1) per breakpoint.
inline void walk_chunk(const SweepProblem& pb, std::size_t len0, std::size_t len1, std::span<PrefixValue> out) {
  const std::size_t nm = pb.must_run.size();
  std::vector<const DispatchUnit*> units;
  std::vector<std::size_t> cand_of;  // candidate index for each walk unit
  for (const auto& u : pb.must_run) {
    units.push_back(&u);
    cand_of.push_back(kUnlimitedWidth);
  }
  for (std::size_t i = 0; i < len1; ++i)
    if (pb.ordered[i].produces) {
      units.push_back(&pb.ordered[i].unit);
      cand_of.push_back(i);
    }
  const std::size_t nu = units.size();

  struct Event {
    double value;
    std::uint32_t unit;
    bool lower_edge;
  };
  std::vector<Event> events;
  events.reserve(2 * nu);
  for (std::size_t j = 0; j < nu; ++j) {
    const auto& u = *units[j];
    events.push_back({u.cost.marginal(u.upper), static_cast<std::uint32_t>(j), false});
    events.push_back({u.cost.marginal(u.lower), static_cast<std::uint32_t>(j), true});
  }
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
    if (x.value != y.value) return x.value > y.value;
    if (x.lower_edge != y.lower_edge) return !x.lower_edge;
    return x.unit < y.unit;
  });

  enum : std::uint8_t { kUpper, kInterior, kLower };
  std::vector<std::uint8_t> regime(nu, kUpper);
  std::vector<std::uint8_t> active(nu, 0);
  // supply = A * lambda + B; cost = fixed + Q * lambda^2 + q
  double A = 0.0, B = 0.0, fixed = 0.0, Q = 0.0, q = 0.0;
  double sum_upper = 0.0, sum_lower = 0.0, cost_lower = 0.0;

  auto contribute = [&](std::size_t j, double sign) {
    const auto& u = *units[j];
    switch (regime[j]) {
      case kUpper:
        B += sign * u.upper;
        fixed += sign * u.cost(u.upper);
        break;
      case kLower:
        B += sign * u.lower;
        fixed += sign * u.cost(u.lower);
        break;
      default:
        A += sign / (2.0 * u.cost.a);
        B -= sign * u.cost.b / (2.0 * u.cost.a);
        Q += sign / (4.0 * u.cost.a);
        q += sign * (u.cost.c - u.cost.b * u.cost.b / (4.0 * u.cost.a));
    }
  };
  auto activate = [&](std::size_t j) {
    active[j] = 1;
    const auto& u = *units[j];
    sum_upper += u.upper;
    sum_lower += u.lower;
    cost_lower += u.cost(u.lower);
    contribute(j, 1.0);
  };

  // Penalty and idle supply of the unselected tail, as suffix sums.
  const std::size_t nc = pb.ordered.size();
  std::vector<double> tail_penalty(nc + 1, 0.0), tail_supply(nc + 1, 0.0), head_penalty(nc + 1, 0.0);
  for (std::size_t i = nc; i-- > 0;) {
    tail_penalty[i] = tail_penalty[i + 1] + pb.ordered[i].idle_penalty;
    tail_supply[i] = tail_supply[i + 1] + pb.ordered[i].idle_supply;
  }
  for (std::size_t i = 0; i < nc; ++i) head_penalty[i + 1] = head_penalty[i] + pb.ordered[i].unit.start_penalty;

  std::size_t next_unit = 0, pos = 0;
  double lambda_hi = std::numeric_limits<double>::infinity();
  for (std::size_t len = len0; len <= len1; ++len) {
    while (next_unit < nu && (next_unit < nm || cand_of[next_unit] < len)) activate(next_unit++);
    const double demand = pb.demand - tail_supply[len];
    const double penalties = head_penalty[len] + tail_penalty[len];
    PrefixValue& pv = out[len - len0];
    if (nu == 0 || next_unit == 0) {
      pv.feasible = demand <= 0.0;
      pv.objective = penalties;
      continue;
    }
    if (sum_upper < demand) continue;
    if (sum_lower >= demand) {
      pv.feasible = true;
      pv.objective = cost_lower + penalties;
      continue;
    }
    double lambda = 0.0;
    for (;;) {
      const double seg_low = pos < events.size() ? events[pos].value : -std::numeric_limits<double>::infinity();
      if (pos == events.size() || A * seg_low + B <= demand) {
        lambda = A > 0.0 ? (demand - B) / A : seg_low;
        lambda = std::clamp(lambda, seg_low, lambda_hi);
        break;
      }
      const Event& ev = events[pos++];
      lambda_hi = ev.value;
      if (active[ev.unit]) contribute(ev.unit, -1.0);
      regime[ev.unit] = ev.lower_edge ? kLower : kInterior;
      if (active[ev.unit]) contribute(ev.unit, 1.0);
    }
    pv.feasible = true;
    pv.objective = fixed + Q * lambda * lambda + q + penalties;
  }
}

inline void scan_chunk(const SweepProblem& pb, std::size_t len0, std::size_t len1, bool walk,
                       std::span<PrefixValue> out) {
  if (walk) {
    walk_chunk(pb, len0, len1, out);
    return;
  }
  for (std::size_t len = len0; len <= len1; ++len) {
    const SweepResult r = evaluate_prefix(pb, len);
    out[len - len0] = {r.feasible, r.objective};
  }
}

}  // namespace detail

/// Cheapest feasible prefix commitment over the range, ties toward smaller k.
/// The range is scanned in fixed chunks so the result does not depend on
/// whether chunks run concurrently. The winner is re-dispatched from scratch.
/// If no k is feasible every candidate is committed (emergency).
inline SweepResult sweep_dispatch(const SweepProblem& pb) {
  const std::size_t nm = pb.must_run.size();
  const CommitRange& range = pb.range;
  if (range.m < nm || range.m > range.m_max || range.m_max > nm + pb.ordered.size())
    throw ArgumentError("sweep range outside the candidate list");
  const std::size_t len_lo = range.m - nm, len_hi = range.m_max - nm;
  const std::size_t count = len_hi - len_lo + 1;
  std::vector<detail::PrefixValue> values(count);
  const bool walk = detail::walk_applies(pb);
  const std::size_t chunks = (count + detail::kSweepChunk - 1) / detail::kSweepChunk;
  auto run_chunk = [&](std::size_t c) {
    const std::size_t a = len_lo + c * detail::kSweepChunk;
    const std::size_t b = std::min(len_hi, a + detail::kSweepChunk - 1);
    detail::scan_chunk(pb, a, b, walk, std::span(values).subspan(a - len_lo, b - a + 1));
  };

  const std::size_t workers =
      pb.parallel ? std::min<std::size_t>(chunks, std::max(2u, std::thread::hardware_concurrency())) : 1;
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t c; (c = next.fetch_add(1)) < chunks;) run_chunk(c);
      });
    for (auto& t : pool) t.join();
  }

  std::size_t best = count;
  for (std::size_t i = 0; i < count; ++i) {
    if (!values[i].feasible) continue;
    if (best == count || values[i].objective < values[best].objective) best = i;
  }
  SweepResult res;
  if (best == count) {
    res = evaluate_prefix(pb, pb.ordered.size());
    res.emergency = true;
    if (!res.feasible) {
      // Max effort: everything dispatched at its upper limit.
      for (std::size_t j = 0; j < nm; ++j) res.must_run_output[j] = pb.must_run[j].upper;
      double total = 0.0, cost = 0.0;
      for (std::size_t j = 0; j < nm; ++j) {
        total += pb.must_run[j].upper;
        cost += pb.must_run[j].cost(pb.must_run[j].upper);
      }
      for (std::size_t i = 0; i < pb.ordered.size(); ++i) {
        const auto& c = pb.ordered[i];
        cost += c.unit.start_penalty;
        if (!c.produces) continue;
        res.ordered_output[i] = c.unit.upper;
        total += c.unit.upper;
        cost += c.unit.cost(c.unit.upper);
      }
      res.objective = cost;
      res.shortfall = std::max(0.0, pb.demand - total);
    }
  } else {
    res = evaluate_prefix(pb, len_lo + best);
  }
  res.evaluated = count;
  return res;
}

/// A single-period runtime-model instance: must-run units plus discretionary
/// candidates with switching penalty K and previous status u0. Cost curves are
/// hourly and are scaled by `period_hours`.
struct UcCandidate {
  GeneratorSpec spec;
  double penalty = 0.0;
  int prev_status = 0;
};

struct UcInstance {
  std::vector<GeneratorSpec> must_run;
  std::vector<UcCandidate> discretionary;
  double demand = 0.0;
  ForecastWindow window;
  double period_hours = 1.0;
};

struct SweepOptions {
  bool parallel = false;
  std::size_t max_width = kUnlimitedWidth;
};

struct RrucSolution {
  std::vector<std::uint8_t> committed;  // per discretionary candidate
  std::vector<double> must_run_output;
  std::vector<double> output;  // per discretionary candidate
  std::vector<std::size_t> order;
  CommitRange range;
  RelaxedSolution relaxed;
  SweepResult sweep;
  bool fallback_order = false;
};

/// The relaxed commitment problem of an instance (global R in the capacity row).
inline RelaxedProblem relaxed_problem(const UcInstance& inst) {
  RelaxedProblem pb;
  double r = 0.0;
  for (const auto& g : inst.must_run) {
    pb.must_run.push_back({g.cost.scaled(inst.period_hours), g.p_min, g.p_max, g.p_max, g.p_min});
    r = std::max(r, g.p_max);
  }
  for (const auto& c : inst.discretionary) {
    RelaxedUnit u;
    u.cost = c.spec.cost.scaled(inst.period_hours);
    u.lower = c.spec.p_min;
    u.upper = c.spec.p_max;
    u.cap_max = c.spec.p_max;
    u.cap_min = c.spec.p_min;
    u.penalty = c.penalty;
    u.prev_status = c.prev_status;
    pb.units.push_back(u);
    r = std::max(r, c.spec.p_max);
  }
  pb.demand = inst.demand;
  pb.capacity_target = inst.window.d_max_72 + 3.0 * inst.window.sigma_d + r;
  pb.floor_target = inst.window.d_min_72 - inst.window.sigma_d;
  return pb;
}

/// Relax, order, bracket and sweep one runtime-model period.
inline RrucSolution solve_rruc(const UcInstance& inst, const RelaxConfig& relax = {}, const SweepOptions& opt = {}) {
  RrucSolution sol;
  const std::size_t nd = inst.discretionary.size();
  sol.relaxed = solve_relaxed(relaxed_problem(inst), relax);
  std::vector<const GeneratorSpec*> specs;
  for (const auto& c : inst.discretionary) specs.push_back(&c.spec);
  sol.fallback_order = sol.relaxed.status != RelaxStatus::converged;
  sol.order = order_candidates(sol.relaxed, specs, false);

  std::vector<const GeneratorSpec*> ordered, must_run;
  for (std::size_t i : sol.order) ordered.push_back(specs[i]);
  for (const auto& g : inst.must_run) must_run.push_back(&g);
  sol.range = find_commit_range(ordered, must_run, inst.window, opt.max_width);

  SweepProblem sp;
  for (const auto& g : inst.must_run) sp.must_run.push_back({g.cost.scaled(inst.period_hours), g.p_min, g.p_max, 0.0});
  for (std::size_t i : sol.order) {
    const auto& c = inst.discretionary[i];
    SweepCandidate sc;
    sc.unit = {c.spec.cost.scaled(inst.period_hours), c.spec.p_min, c.spec.p_max,
               c.prev_status ? 0.0 : c.penalty};
    sp.ordered.push_back(sc);
  }
  sp.demand = inst.demand;
  sp.range = sol.range;
  sp.parallel = opt.parallel;
  sol.sweep = sweep_dispatch(sp);

  sol.committed.assign(nd, 0);
  sol.output.assign(nd, 0.0);
  const std::size_t len = sol.sweep.k - inst.must_run.size();
  for (std::size_t r = 0; r < len; ++r) {
    sol.committed[sol.order[r]] = 1;
    sol.output[sol.order[r]] = sol.sweep.ordered_output[r];
  }
  sol.must_run_output = sol.sweep.must_run_output;
  return sol;
}

}  // namespace rruc
