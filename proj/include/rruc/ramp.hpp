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
#include <span>
#include <string_view>
#include <vector>

#include "rruc/constraints_runtime.hpp"

namespace rruc {

enum class RampKind { piecewise, smooth };

inline std::string_view to_string(RampKind k) { return k == RampKind::smooth ? "smooth" : "piecewise"; }

inline RampKind ramp_kind_from_string(std::string_view s) {
  if (s == "piecewise") return RampKind::piecewise;
  if (s == "smooth") return RampKind::smooth;
  throw ArgumentError("ramp profile must be 'piecewise' or 'smooth'");
}

/// Stage lengths in periods plus per-period ramp limits in MW.
struct RampProfile {
  RampKind kind = RampKind::piecewise;
  int t_prepare = 1;
  int t_up = 1;
  int t_down = 1;
  int t_combined = 1;
  double r_u = 0.0;
  double r_d = 0.0;
};

namespace detail {
// ceil(minutes / dt), tolerant of representation noise, at least one period.
inline int periods_ceil(double minutes, double dt) {
  return std::max(1, static_cast<int>(std::ceil(minutes / dt - 1e-9)));
}
}  // namespace detail

inline RampProfile ramp_durations(const GeneratorSpec& g, double dt, double off_duration, RampKind kind,
                                  const StartTypeThresholds& th = {}) {
  if (!(dt > 0.0)) throw ArgumentError("period length must be positive");
  RampProfile p;
  p.kind = kind;
  p.r_u = g.ramp_up_rate * dt;
  p.r_d = g.ramp_down_rate * dt;
  const double prepare = g.start_durations[start_type(off_duration, th)];
  const double up = g.p_min / g.ramp_up_rate;
  p.t_prepare = detail::periods_ceil(prepare, dt);
  p.t_up = detail::periods_ceil(up, dt);
  p.t_down = detail::periods_ceil(g.p_min / g.ramp_down_rate, dt);
  p.t_combined = detail::periods_ceil(prepare + up, dt);
  return p;
}

/// Output of a unit in a ramping stage. Under the smooth profile ramp_up
/// stands for the combined prepare-and-ramp stage.
inline double ramp_output(const GeneratorSpec& g, const RampProfile& p, Stage stage, int age) {
  const double a = static_cast<double>(age);
  switch (stage) {
    case Stage::prepare: return 0.0;
    case Stage::ramp_up:
      if (p.kind == RampKind::smooth) return g.p_min * std::pow(a / p.t_combined, 2);
      return g.p_min * a / p.t_up;
    case Stage::ramp_down: return std::max(0.0, g.p_min * (1.0 - a / p.t_down));
    default: throw ContractViolation("ramp_output called for a unit that is " + std::string(to_string(stage)));
  }
}

inline bool is_ramping(Stage s) noexcept { return s == Stage::prepare || s == Stage::ramp_up || s == Stage::ramp_down; }

/// Output of a ramping unit from its stored stage length. The first ramp-down
/// period delivers p_min - r_d, the value the dispatch relied on when it stopped.
inline double ramping_output(const GeneratorSpec& g, const GeneratorState& s, double dt) {
  RampProfile p;
  p.kind = s.quadratic ? RampKind::smooth : RampKind::piecewise;
  p.t_up = p.t_down = p.t_combined = s.stage_duration;
  if (s.stage == Stage::ramp_down && s.stage_age == 1) return std::max(0.0, g.p_min - g.ramp_down_rate * dt);
  return ramp_output(g, p, s.stage, s.stage_age);
}

struct RampingSupply {
  double s_r = 0.0;
  double s_max_r = 0.0;
  double s_min_r = 0.0;
};

inline RampingSupply ramping_supply(std::span<const GeneratorState> states, std::span<const GeneratorSpec> specs,
                                    double dt) {
  if (states.size() != specs.size()) throw ArgumentError("state and spec counts differ");
  RampingSupply r;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    if (!is_ramping(s.stage)) continue;
    r.s_r += ramping_output(specs[i], s, dt);
    if (s.stage != Stage::ramp_down) {
      r.s_max_r += specs[i].p_max;
      r.s_min_r += specs[i].p_min;
    }
  }
  return r;
}

/// Ramp-model classification. Ramping units are in none of the lists.
inline Classification classify_ramp(std::span<const GeneratorState> states, std::span<const GeneratorSpec> specs,
                                    double now, double dt) {
  if (states.size() != specs.size()) throw ArgumentError("state and spec counts differ");
  Classification c;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    const auto& g = specs[i];
    if (s.stage == Stage::on) {
      const bool pinned = s.on_duration < g.min_runtime || s.prev_output > g.p_min + g.ramp_down_rate * dt;
      (pinned ? c.must_run : c.discretionary).push_back(i);
    } else if (s.stage == Stage::off) {
      const bool capped = s.starts_in_window(now) >= static_cast<std::size_t>(g.max_daily_starts);
      (capped ? c.excluded : c.discretionary).push_back(i);
    }
  }
  return c;
}

/// Advances ages of ramping units and promotes the ones whose stage ran out.
inline void advance_ramps(std::span<GeneratorState> states, std::span<const GeneratorSpec> specs, double dt,
                          const StartTypeThresholds& th) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto& s = states[i];
    ++s.stage_age;
    if (!is_ramping(s.stage) || s.stage_age <= s.stage_duration) continue;
    switch (s.stage) {
      case Stage::prepare:
        s.stage = Stage::ramp_up;
        s.stage_duration = ramp_durations(specs[i], dt, 0.0, RampKind::piecewise, th).t_up;
        break;
      case Stage::ramp_up:
        s.stage = Stage::on;
        s.stage_duration = 0;
        s.quadratic = false;
        s.on_duration = 0.0;
        break;
      default:
        s.stage = Stage::off;
        s.stage_duration = 0;
        s.off_duration = 0.0;
        s.prev_output = 0.0;
        break;
    }
    s.stage_age = 1;
  }
}

/// One period of the runtime- and ramp-constrained model.
inline PeriodDecision step_ramp_uc(UcSystem& sys, std::size_t t, RampKind kind) {
  const auto& specs = sys.fleet.generators;
  const std::size_t n = specs.size();
  const double dt = sys.trace.dt, now = sys.minutes(t), hours = sys.hours();
  const auto& th = sys.config.thresholds;
  for (auto& s : sys.states) s.prune_starts(now);
  advance_ramps(sys.states, specs, dt, th);
  const RampingSupply rs = ramping_supply(sys.states, specs, dt);
  const Classification cls = classify_ramp(sys.states, specs, now, dt);
  const ForecastWindow fw = forecast_stats(sys.trace, t, sys.trace.sigma_d, 1.0);
  const double demand = sys.trace.values.at(t);

  auto lower = [&](std::size_t i) { return std::max(specs[i].p_min, sys.states[i].prev_output - specs[i].ramp_down_rate * dt); };
  auto upper = [&](std::size_t i) { return std::min(specs[i].p_max, sys.states[i].prev_output + specs[i].ramp_up_rate * dt); };
  auto idle_supply = [&](std::size_t i) { return std::max(0.0, specs[i].p_min - specs[i].ramp_down_rate * dt); };

  RelaxedProblem rp;
  double r_global = 0.0;
  for (std::size_t i : cls.must_run) {
    rp.must_run.push_back({specs[i].cost.scaled(hours), lower(i), upper(i), specs[i].p_max, specs[i].p_min});
    r_global = std::max(r_global, specs[i].p_max);
  }
  std::vector<double> penalty(cls.discretionary.size()), start_extra(cls.discretionary.size(), 0.0);
  for (std::size_t j = 0; j < cls.discretionary.size(); ++j) {
    const std::size_t i = cls.discretionary[j];
    const auto& s = sys.states[i];
    penalty[j] = startup_penalty(specs[i], s, th);
    RelaxedUnit u;
    u.cost = specs[i].cost.scaled(hours);
    u.cap_max = specs[i].p_max;
    u.cap_min = specs[i].p_min;
    u.penalty = penalty[j];
    if (s.stage == Stage::on) {
      u.lower = lower(i);
      u.upper = upper(i);
      u.prev_status = 1.0;
      u.idle_supply = idle_supply(i);
    } else {
      u.lower = specs[i].p_min;
      u.upper = specs[i].p_max;
      u.produces = false;
      start_extra[j] = sys.config.beta * specs[i].average_cost_at_typ();
      u.score_cost = start_extra[j];
    }
    rp.units.push_back(u);
    r_global = std::max(r_global, specs[i].p_max);
  }
  rp.demand = demand - rs.s_r;
  rp.capacity_target = fw.d_max_72 + 3.0 * fw.sigma_d - rs.s_max_r;
  rp.floor_target = fw.d_min_72 - fw.sigma_d - rs.s_min_r;
  const RelaxedSolution relaxed = solve_relaxed(rp, sys.config.relax);

  std::vector<const GeneratorSpec*> cand;
  for (std::size_t i : cls.discretionary) cand.push_back(&specs[i]);
  const auto order = order_candidates(relaxed, cand, false);

  RangeInput in;
  in.must_run_count = cls.must_run.size();
  for (std::size_t i : cls.must_run) {
    in.must_run_cap_max += specs[i].p_max;
    in.must_run_cap_min += specs[i].p_min;
    in.must_run_reserve = std::max(in.must_run_reserve, specs[i].p_max);
  }
  for (std::size_t j : order) {
    in.cap_max.push_back(cand[j]->p_max);
    in.cap_min.push_back(cand[j]->p_min);
  }
  in.capacity_rhs = rp.capacity_target;
  in.floor_rhs = rp.floor_target;
  in.max_width = sys.config.sweep.max_width;
  const CommitRange range = find_commit_range(in);

  SweepProblem sp;
  for (std::size_t i : cls.must_run) sp.must_run.push_back({specs[i].cost.scaled(hours), lower(i), upper(i), 0.0});
  for (std::size_t j : order) {
    const std::size_t i = cls.discretionary[j];
    SweepCandidate c;
    if (sys.states[i].stage == Stage::on) {
      c.unit = {specs[i].cost.scaled(hours), lower(i), upper(i), 0.0};
      c.idle_penalty = penalty[j];
      c.idle_supply = idle_supply(i);
    } else {
      c.unit = {specs[i].cost.scaled(hours), specs[i].p_min, specs[i].p_max, penalty[j] + start_extra[j]};
      c.produces = false;
    }
    sp.ordered.push_back(c);
  }
  sp.demand = demand - rs.s_r;
  sp.range = range;
  sp.parallel = sys.config.sweep.parallel;
  const SweepResult sw = sweep_dispatch(sp);

  PeriodDecision d = empty_decision(n, t);
  d.objective = sw.objective;
  d.lambda = sw.lambda;
  d.k_selected = sw.k;
  auto& dg = d.diagnostics;
  dg.relax_status = relaxed.status;
  dg.relax_kkt = relaxed.kkt_residual;
  dg.fallback_order = relaxed.status != RelaxStatus::converged;
  dg.sweep_width = range.width();
  dg.evaluated = sw.evaluated;
  dg.capacity_shortfall = range.capacity_shortfall;
  dg.floor_violated = range.floor_violated;
  dg.emergency = sw.emergency;
  dg.shortfall = sw.shortfall;

  for (std::size_t j = 0; j < cls.must_run.size(); ++j) {
    d.committed[cls.must_run[j]] = 1;
    d.outputs[cls.must_run[j]] = sw.must_run_output[j];
  }
  const std::size_t len = sw.k - cls.must_run.size();
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t i = cls.discretionary[order[r]];
    auto& s = sys.states[i];
    const bool keep = r < len;
    if (s.stage == Stage::on) {
      if (keep) {
        d.committed[i] = 1;
        d.outputs[i] = sw.ordered_output[r];
      } else {
        if (s.on_duration < specs[i].min_runtime) throw ContractViolation("unit " + specs[i].id + " stopped before its minimum runtime", static_cast<long>(t));
        d.stopping[i] = 1;
        s.stage = Stage::ramp_down;
        s.stage_age = 1;
        s.stage_duration = ramp_durations(specs[i], dt, 0.0, kind, th).t_down;
        s.on_duration = 0.0;
      }
    } else if (keep) {
      if (s.starts_in_window(now) >= static_cast<std::size_t>(specs[i].max_daily_starts))
        throw ContractViolation("unit " + specs[i].id + " started beyond its daily cap", static_cast<long>(t));
      const RampProfile p = ramp_durations(specs[i], dt, s.off_duration, kind, th);
      d.starting[i] = 1;
      s.start_log.push_back(now);
      s.stage_age = 1;
      if (kind == RampKind::smooth) {
        s.stage = Stage::ramp_up;
        s.quadratic = true;
        s.stage_duration = p.t_combined;
      } else {
        s.stage = Stage::prepare;
        s.stage_duration = p.t_prepare;
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto& s = sys.states[i];
    if (is_ramping(s.stage)) d.outputs[i] = ramping_output(specs[i], s, dt);
    if (s.stage == Stage::on) s.on_duration += dt;
    if (s.stage == Stage::off) s.off_duration += dt;
    s.prev_output = d.outputs[i];
    d.stages[i] = s.stage;
  }
  return d;
}

}  // namespace rruc
