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

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "rruc/demand.hpp"
#include "rruc/fleet.hpp"
#include "rruc/rruc_core.hpp"

namespace rruc {

enum class UcModel { runtime, ramp_piecewise, ramp_smooth };

inline std::string_view to_string(UcModel m) {
  switch (m) {
    case UcModel::runtime: return "runtime";
    case UcModel::ramp_piecewise: return "ramp_piecewise";
    case UcModel::ramp_smooth: return "ramp_smooth";
  }
  return "?";
}

inline UcModel model_from_string(std::string_view s) {
  if (s == "runtime") return UcModel::runtime;
  if (s == "ramp_piecewise") return UcModel::ramp_piecewise;
  if (s == "ramp_smooth") return UcModel::ramp_smooth;
  throw ArgumentError("model must be runtime, ramp_piecewise or ramp_smooth");
}

enum class ViolationKind { min_runtime, start_cap, ramp_rate, state_machine, stage_duration, ramp_output, output_bounds, demand };

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::min_runtime: return "min_runtime";
    case ViolationKind::start_cap: return "start_cap";
    case ViolationKind::ramp_rate: return "ramp_rate";
    case ViolationKind::state_machine: return "state_machine";
    case ViolationKind::stage_duration: return "stage_duration";
    case ViolationKind::ramp_output: return "ramp_output";
    case ViolationKind::output_bounds: return "output_bounds";
    case ViolationKind::demand: return "demand";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::size_t period = 0;
  std::size_t unit = 0;
  std::string detail;
};

struct ReplayReport {
  std::vector<Violation> violations;
  std::size_t periods = 0;
  std::size_t flagged_shortfall = 0;  // periods whose decision declared a shortfall

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(ViolationKind k) const {
    std::size_t n = 0;
    for (const auto& v : violations) n += v.kind == k ? 1 : 0;
    return n;
  }
};

struct ReplayOptions {
  double warm_after = 8 * 60.0;  // start-type thresholds, minutes off
  double cold_after = 48 * 60.0;
  double initial_off_minutes = 72 * 60.0;
  double tol = 1e-6;  // MW
};

/// Rechecks a decision log against the fleet and trace without touching the
/// solver's state machine. Every rule is recomputed from the log alone.
inline ReplayReport replay_validate(const Fleet& fleet, const DemandTrace& trace,
                                    const std::vector<PeriodDecision>& log, UcModel model,
                                    const ReplayOptions& opt = {}) {
  ReplayReport rep;
  rep.periods = log.size();
  const std::size_t n = fleet.size();
  const double dt = trace.dt;
  const bool ramp = model != UcModel::runtime;
  const bool smooth = model == UcModel::ramp_smooth;
  auto flag = [&](ViolationKind k, std::size_t t, std::size_t i, std::string msg) {
    rep.violations.push_back({k, t, i, std::move(msg)});
  };
  auto is_ramp_stage = [](Stage s) { return s == Stage::prepare || s == Stage::ramp_up || s == Stage::ramp_down; };
  auto periods_for = [&](double minutes) {
    long k = static_cast<long>(std::ceil(minutes / dt - 1e-9));
    return k < 1 ? 1L : k;
  };

  // Demand, per period.
  for (std::size_t t = 0; t < log.size(); ++t) {
    const auto& d = log[t];
    if (d.outputs.size() != n || d.stages.size() != n || d.committed.size() != n) {
      flag(ViolationKind::state_machine, t, 0, "decision vectors do not match the fleet size");
      return rep;
    }
    double total = 0.0;
    for (double p : d.outputs) total += p;
    if (d.diagnostics.shortfall > 0.0) {
      ++rep.flagged_shortfall;
    } else if (total < trace.values.at(t) - opt.tol * std::max(1.0, trace.values[t])) {
      flag(ViolationKind::demand, t, 0, "supply " + std::to_string(total) + " below demand " + std::to_string(trace.values[t]));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = fleet[i];
    const double r_u = g.ramp_up_rate * dt, r_d = g.ramp_down_rate * dt;
    Stage prev = Stage::off;
    double prev_p = 0.0;
    long run = 0;                 // periods in the current stage
    long stage_len = 0;           // required length of the current ramping stage
    long off_since = 0;           // first period of the current off spell
    double off_extra = opt.initial_off_minutes;
    std::vector<double> starts;

    for (std::size_t t = 0; t < log.size(); ++t) {
      const auto& d = log[t];
      const Stage s = d.stages[i];
      const double p = d.outputs[i];
      const bool entered = s != prev;
      if (entered && is_ramp_stage(prev) && run != stage_len)
        flag(ViolationKind::stage_duration, t, i, "ramping stage lasted " + std::to_string(run) + " of " + std::to_string(stage_len));

      // Transition legality and event flags.
      bool legal = !entered;
      bool start = false, stop = false;
      if (entered) {
        if (!ramp) {
          legal = (prev == Stage::off && s == Stage::on) || (prev == Stage::on && s == Stage::off);
          start = s == Stage::on;
          stop = s == Stage::off;
        } else if (smooth) {
          legal = (prev == Stage::off && s == Stage::ramp_up) || (prev == Stage::ramp_up && s == Stage::on) ||
                  (prev == Stage::on && s == Stage::ramp_down) || (prev == Stage::ramp_down && s == Stage::off);
          start = s == Stage::ramp_up;
          stop = s == Stage::ramp_down;
        } else {
          legal = (prev == Stage::off && s == Stage::prepare) || (prev == Stage::prepare && s == Stage::ramp_up) ||
                  (prev == Stage::ramp_up && s == Stage::on) || (prev == Stage::on && s == Stage::ramp_down) ||
                  (prev == Stage::ramp_down && s == Stage::off);
          start = s == Stage::prepare;
          stop = s == Stage::ramp_down;
        }
      }
      if (!legal)
        flag(ViolationKind::state_machine, t, i, std::string("illegal transition ") + std::string(to_string(prev)) + " -> " + std::string(to_string(s)));
      if ((d.starting[i] != 0) != start) flag(ViolationKind::state_machine, t, i, "start flag disagrees with the stage log");
      if ((d.stopping[i] != 0) != stop) flag(ViolationKind::state_machine, t, i, "stop flag disagrees with the stage log");
      if ((d.committed[i] != 0) != (s == Stage::on)) flag(ViolationKind::state_machine, t, i, "commit flag disagrees with the stage log");
      if (ramp && d.committed[i] + d.starting[i] + d.stopping[i] > 1) flag(ViolationKind::state_machine, t, i, "u + v + w exceeds 1");

      // Minimum runtime at the end of an on spell.
      if (stop && run * dt < g.min_runtime - 1e-9)
        flag(ViolationKind::min_runtime, t, i, "on for " + std::to_string(run * dt) + " min");
      if (stop && ramp && prev_p > g.p_min + r_d + opt.tol)
        flag(ViolationKind::ramp_rate, t, i, "stopped from above the shutdown band");

      if (start) {
        starts.push_back(t * dt);
        std::size_t in_window = 0;
        for (double st : starts) in_window += st > t * dt - kMinutesPerDay ? 1 : 0;
        if (in_window > static_cast<std::size_t>(g.max_daily_starts))
          flag(ViolationKind::start_cap, t, i, std::to_string(in_window) + " starts within 24 h");
      }

      if (entered) {
        const double off_minutes = (static_cast<double>(t) - static_cast<double>(off_since)) * dt + off_extra;
        const double prep = off_minutes < opt.warm_after   ? g.start_durations.hot
                            : off_minutes < opt.cold_after ? g.start_durations.warm
                                                           : g.start_durations.cold;
        if (s == Stage::prepare) stage_len = periods_for(prep);
        if (s == Stage::ramp_up) stage_len = smooth ? periods_for(prep + g.p_min / g.ramp_up_rate) : periods_for(g.p_min / g.ramp_up_rate);
        if (s == Stage::ramp_down) stage_len = periods_for(g.p_min / g.ramp_down_rate);
        if (s == Stage::off) {
          off_since = static_cast<long>(t);
          off_extra = 0.0;
        }
        run = 0;
      }
      ++run;

      // Outputs.
      const double tol = opt.tol * std::max(1.0, g.p_max);
      if (s == Stage::off && std::abs(p) > tol) flag(ViolationKind::output_bounds, t, i, "off unit produces");
      if (s == Stage::on && (p < g.p_min - tol || p > g.p_max + tol)) flag(ViolationKind::output_bounds, t, i, "on output outside [p_min, p_max]");
      if (ramp && is_ramp_stage(s)) {
        if (run > stage_len) flag(ViolationKind::stage_duration, t, i, "ramping stage overran");
        const double a = static_cast<double>(run), L = static_cast<double>(stage_len);
        double want = 0.0;
        if (s == Stage::ramp_up) want = smooth ? g.p_min * (a / L) * (a / L) : g.p_min * a / L;
        if (s == Stage::ramp_down) want = run == 1 ? std::max(0.0, g.p_min - r_d) : std::max(0.0, g.p_min * (1.0 - a / L));
        if (std::abs(p - want) > tol) flag(ViolationKind::ramp_output, t, i, "ramp output " + std::to_string(p) + " expected " + std::to_string(want));
      }
      if (ramp && s == Stage::on && (prev == Stage::on || prev == Stage::ramp_up)) {
        if (p - prev_p > r_u + tol || prev_p - p > r_d + tol)
          flag(ViolationKind::ramp_rate, t, i, "step " + std::to_string(p - prev_p) + " MW");
      }
      prev = s;
      prev_p = p;
    }
  }
  return rep;
}

}  // namespace rruc
