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

#include <cstdint>
#include <deque>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rruc/demand.hpp"
#include "rruc/error.hpp"
#include "rruc/fleet.hpp"
#include "rruc/rruc_core.hpp"

namespace rruc {

/// Off-duration thresholds (minutes) separating hot, warm and cold starts.
struct StartTypeThresholds {
  double warm_after = 8 * 60.0;
  double cold_after = 48 * 60.0;
};

inline StartType start_type(double off_minutes, const StartTypeThresholds& th = {}) {
  if (off_minutes < th.warm_after) return StartType::hot;
  if (off_minutes < th.cold_after) return StartType::warm;
  return StartType::cold;
}

/// Mutable record of one unit. Durations are minutes; `stage_age` counts the
/// periods spent in the current stage including the current one.
struct GeneratorState {
  Stage stage = Stage::off;
  int stage_age = 1;
  int stage_duration = 0;  // length of the current ramping stage in periods
  bool quadratic = false;  // current ramp-up follows the smooth profile
  double prev_output = 0.0;
  double on_duration = 0.0;
  double off_duration = 0.0;
  std::deque<double> start_log;  // start times, minutes from the trace origin

  /// Drops starts that left the 24 h window ending at `now`.
  void prune_starts(double now) {
    while (!start_log.empty() && start_log.front() <= now - kMinutesPerDay) start_log.pop_front();
  }
  std::size_t starts_in_window(double now) const {
    std::size_t n = 0;
    for (double s : start_log) n += s > now - kMinutesPerDay ? 1 : 0;
    return n;
  }

  friend bool operator==(const GeneratorState&, const GeneratorState&) = default;
};

struct Classification {
  std::vector<std::size_t> must_run;
  std::vector<std::size_t> discretionary;
  std::vector<std::size_t> excluded;
};

/// Runtime-model classification at time `now` (minutes). On units below their
/// minimum runtime must run; off units at their daily start cap sit out.
inline Classification classify_generators(std::span<const GeneratorState> states,
                                          std::span<const GeneratorSpec> specs, double now) {
  if (states.size() != specs.size()) throw ArgumentError("state and spec counts differ");
  Classification c;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    if (s.stage == Stage::on) {
      (s.on_duration < specs[i].min_runtime ? c.must_run : c.discretionary).push_back(i);
    } else if (s.stage == Stage::off) {
      const bool capped = s.starts_in_window(now) >= static_cast<std::size_t>(specs[i].max_daily_starts);
      (capped ? c.excluded : c.discretionary).push_back(i);
    } else {
      throw ContractViolation("runtime model cannot hold a ramping stage");
    }
  }
  return c;
}

/// Switching penalty K: mean of the start cost for the current off duration and
/// the shutdown cost. Units that are not off use the hot start cost.
inline double startup_penalty(const GeneratorSpec& g, const GeneratorState& s, const StartTypeThresholds& th = {}) {
  const StartType type = s.stage == Stage::off ? start_type(s.off_duration, th) : StartType::hot;
  return 0.5 * (g.start_costs[type] + g.shutdown_cost);
}

struct UcConfig {
  RelaxConfig relax;
  SweepOptions sweep;
  StartTypeThresholds thresholds;
  double beta = 0.001;
  double initial_off_minutes = 72 * 60.0;
};

/// Fleet, trace, configuration and the evolving unit states.
struct UcSystem {
  Fleet fleet;
  DemandTrace trace;
  UcConfig config;
  std::vector<GeneratorState> states;

  UcSystem(Fleet f, DemandTrace t, UcConfig c = {})
      : fleet(std::move(f)), trace(std::move(t)), config(c), states(fleet.size()) {
    for (auto& s : states) s.off_duration = config.initial_off_minutes;
  }

  double minutes(std::size_t period) const noexcept { return static_cast<double>(period) * trace.dt; }
  double hours() const noexcept { return trace.dt / 60.0; }
};

inline PeriodDecision empty_decision(std::size_t n, std::size_t period) {
  PeriodDecision d;
  d.period = static_cast<int>(period);
  d.committed.assign(n, 0);
  d.starting.assign(n, 0);
  d.stopping.assign(n, 0);
  d.outputs.assign(n, 0.0);
  d.stages.assign(n, Stage::off);
  return d;
}

/// One period of the runtime-constrained model. A starting unit is committed in
/// the same period, so `committed` and `starting` overlap here.
inline PeriodDecision step_runtime_uc(UcSystem& sys, std::size_t t) {
  const auto& specs = sys.fleet.generators;
  const std::size_t n = specs.size();
  const double now = sys.minutes(t);
  for (auto& s : sys.states) s.prune_starts(now);
  const Classification cls = classify_generators(sys.states, specs, now);

  UcInstance inst;
  inst.period_hours = sys.hours();
  for (std::size_t i : cls.must_run) inst.must_run.push_back(specs[i]);
  for (std::size_t i : cls.discretionary) {
    UcCandidate c;
    c.spec = specs[i];
    c.penalty = startup_penalty(specs[i], sys.states[i], sys.config.thresholds);
    c.prev_status = sys.states[i].stage == Stage::on ? 1 : 0;
    inst.discretionary.push_back(std::move(c));
  }
  inst.demand = sys.trace.values.at(t);
  inst.window = forecast_stats(sys.trace, t, sys.trace.sigma_d, 1.0);
  const RrucSolution sol = solve_rruc(inst, sys.config.relax, sys.config.sweep);

  PeriodDecision d = empty_decision(n, t);
  d.objective = sol.sweep.objective;
  d.lambda = sol.sweep.lambda;
  d.k_selected = sol.sweep.k;
  auto& dg = d.diagnostics;
  dg.relax_status = sol.relaxed.status;
  dg.relax_kkt = sol.relaxed.kkt_residual;
  dg.fallback_order = sol.fallback_order;
  dg.sweep_width = sol.range.width();
  dg.evaluated = sol.sweep.evaluated;
  dg.capacity_shortfall = sol.range.capacity_shortfall;
  dg.floor_violated = sol.range.floor_violated;
  dg.emergency = sol.sweep.emergency;
  dg.shortfall = sol.sweep.shortfall;

  for (std::size_t j = 0; j < cls.must_run.size(); ++j) {
    d.committed[cls.must_run[j]] = 1;
    d.outputs[cls.must_run[j]] = sol.must_run_output[j];
  }
  for (std::size_t j = 0; j < cls.discretionary.size(); ++j) {
    if (!sol.committed[j]) continue;
    d.committed[cls.discretionary[j]] = 1;
    d.outputs[cls.discretionary[j]] = sol.output[j];
  }

  const double dt = sys.trace.dt;
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = sys.states[i];
    const bool was_on = s.stage == Stage::on;
    const bool on = d.committed[i] != 0;
    if (on && !was_on) {
      d.starting[i] = 1;
      s.start_log.push_back(now);
      s.stage = Stage::on;
      s.stage_age = 0;
      s.on_duration = 0.0;
    } else if (!on && was_on) {
      if (s.on_duration < specs[i].min_runtime) throw ContractViolation("unit " + specs[i].id + " stopped before its minimum runtime", static_cast<int>(t));
      d.stopping[i] = 1;
      s.stage = Stage::off;
      s.stage_age = 0;
      s.off_duration = 0.0;
    }
    ++s.stage_age;
    if (on) {
      s.on_duration += dt;
    } else {
      s.off_duration += dt;
      s.on_duration = 0.0;
    }
    s.prev_output = d.outputs[i];
    d.stages[i] = s.stage;
  }
  return d;
}

// ---------------------------------------------------------------------------
// State snapshots.

inline nlohmann::json state_to_json(const GeneratorState& s) {
  return {{"stage", std::string(to_string(s.stage))}, {"stage_age", s.stage_age},
          {"stage_duration", s.stage_duration},      {"quadratic", s.quadratic},
          {"prev_output", s.prev_output},
          {"on_duration", s.on_duration},            {"off_duration", s.off_duration},
          {"start_log", std::vector<double>(s.start_log.begin(), s.start_log.end())}};
}

inline Stage stage_from_string(const std::string& name) {
  for (Stage s : {Stage::off, Stage::prepare, Stage::ramp_up, Stage::on, Stage::ramp_down})
    if (name == to_string(s)) return s;
  throw FormatError("unknown stage '" + name + "'");
}

inline GeneratorState state_from_json(const nlohmann::json& j) {
  try {
    GeneratorState s;
    s.stage = stage_from_string(j.at("stage").get<std::string>());
    s.stage_age = j.at("stage_age").get<int>();
    s.stage_duration = j.at("stage_duration").get<int>();
    s.quadratic = j.at("quadratic").get<bool>();
    s.prev_output = j.at("prev_output").get<double>();
    s.on_duration = j.at("on_duration").get<double>();
    s.off_duration = j.at("off_duration").get<double>();
    for (double v : j.at("start_log")) s.start_log.push_back(v);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad state snapshot: ") + e.what());
  }
}

/// Snapshot of all unit states keyed by generator id, for resuming a run at `next_period`.
inline nlohmann::json snapshot_to_json(const UcSystem& sys, std::size_t next_period) {
  nlohmann::json units = nlohmann::json::array();
  for (std::size_t i = 0; i < sys.states.size(); ++i) {
    auto j = state_to_json(sys.states[i]);
    j["id"] = sys.fleet[i].id;
    units.push_back(std::move(j));
  }
  return {{"next_period", next_period}, {"units", std::move(units)}};
}

/// Restores states from a snapshot; returns the period to resume at.
inline std::size_t restore_snapshot(UcSystem& sys, const nlohmann::json& j) {
  try {
    const auto& units = j.at("units");
    if (units.size() != sys.states.size()) throw FormatError("snapshot unit count does not match the fleet");
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (units[i].at("id").get<std::string>() != sys.fleet[i].id)
        throw FormatError("snapshot unit " + std::to_string(i) + " has a different id");
      sys.states[i] = state_from_json(units[i]);
    }
    return j.at("next_period").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad state snapshot: ") + e.what());
  }
}

}  // namespace rruc
