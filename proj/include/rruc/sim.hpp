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

#include <array>
#include <charconv>
#include <chrono>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rruc/constraints_runtime.hpp"
#include "rruc/ramp.hpp"
#include "rruc/replay.hpp"

namespace rruc {

/// Reference system: the base fleet times 22 serves the full reference load.
inline constexpr double kReferenceMultiplier = 22.0;
inline constexpr double kReferenceLowMw = 78'600.0;
inline constexpr double kReferencePeakMw = 160'200.0;
inline constexpr double kReferenceSigmaMw = 1'000.0;

/// Demand trace sized for `multiplier` copies of the base fleet.
inline DemandTrace scaled_demand(double multiplier, int days, int dt, std::uint64_t seed,
                                 double sigma_mw_reference = kReferenceSigmaMw) {
  const double f = multiplier / kReferenceMultiplier;
  DemandTrace tr = synthesize_demand(kReferenceLowMw * f, kReferencePeakMw * f, days, dt, seed);
  tr.sigma_d = sigma_mw_reference * f;
  return tr;
}

using StageCensus = std::array<std::size_t, 5>;  // indexed by Stage

struct SimulationReport {
  UcModel model = UcModel::runtime;
  std::vector<PeriodDecision> decisions;
  std::size_t warmup_periods = 0;
  double total_objective_excl_warmup = 0.0;
  double objective_per_generator = 0.0;
  double wall_time = 0.0;
  std::vector<StageCensus> state_census;
  std::vector<std::pair<std::size_t, std::string>> flags;
  std::size_t no_ramping_steps = 0;  // after warm-up
  std::size_t starts_after_warmup = 0;
  std::size_t shortfall_after_warmup = 0;
};

inline PeriodDecision step_model(UcSystem& sys, std::size_t t, UcModel model) {
  switch (model) {
    case UcModel::runtime: return step_runtime_uc(sys, t);
    case UcModel::ramp_piecewise: return step_ramp_uc(sys, t, RampKind::piecewise);
    case UcModel::ramp_smooth: return step_ramp_uc(sys, t, RampKind::smooth);
  }
  throw ArgumentError("unknown model");
}

inline SimulationReport run_simulation(const Fleet& fleet, const DemandTrace& trace, UcModel model,
                                       const UcConfig& config = {}) {
  const std::size_t day = trace.periods_per_day();
  if (trace.horizon() < 2 * day) throw ArgumentError("simulation needs at least two days of periods");
  if (fleet.size() == 0) throw ArgumentError("simulation needs a non-empty fleet");
  UcSystem sys(fleet, trace, config);
  SimulationReport rep;
  rep.model = model;
  rep.warmup_periods = day;
  rep.decisions.reserve(trace.horizon());

  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t t = 0; t < trace.horizon(); ++t) rep.decisions.push_back(step_model(sys, t, model));
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  for (const auto& d : rep.decisions) {
    const auto t = static_cast<std::size_t>(d.period);
    StageCensus c{};
    for (Stage s : d.stages) ++c[static_cast<std::size_t>(s)];
    rep.state_census.push_back(c);
    const auto& dg = d.diagnostics;
    if (dg.emergency) rep.flags.emplace_back(t, "emergency");
    if (dg.shortfall > 0.0) rep.flags.emplace_back(t, "shortfall");
    if (dg.capacity_shortfall) rep.flags.emplace_back(t, "capacity_shortfall");
    if (dg.floor_violated) rep.flags.emplace_back(t, "floor_violated");
    if (dg.fallback_order) rep.flags.emplace_back(t, std::string("relax_") + std::string(to_string(dg.relax_status)));
    if (t < day) continue;
    rep.total_objective_excl_warmup += d.objective;
    const std::size_t ramping = c[static_cast<std::size_t>(Stage::prepare)] + c[static_cast<std::size_t>(Stage::ramp_up)] +
                                c[static_cast<std::size_t>(Stage::ramp_down)];
    rep.no_ramping_steps += ramping == 0 ? 1 : 0;
    for (auto v : d.starting) rep.starts_after_warmup += v;
    rep.shortfall_after_warmup += dg.shortfall > 0.0 ? 1 : 0;
  }
  rep.objective_per_generator = rep.total_objective_excl_warmup / static_cast<double>(fleet.size());
  return rep;
}

/// Per-period census difference a - b.
inline std::vector<std::array<long, 5>> state_census_diff(const SimulationReport& a, const SimulationReport& b) {
  if (a.state_census.size() != b.state_census.size()) throw ArgumentError("census horizons differ");
  std::vector<std::array<long, 5>> out(a.state_census.size());
  for (std::size_t t = 0; t < out.size(); ++t)
    for (std::size_t s = 0; s < 5; ++s)
      out[t][s] = static_cast<long>(a.state_census[t][s]) - static_cast<long>(b.state_census[t][s]);
  return out;
}

// ---------------------------------------------------------------------------
// Output files.

// Shortest round-trip text for a double, independent of locale.
inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline void write_decisions_csv(const SimulationReport& rep, const Fleet& fleet, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << "period,unit,stage,output\n";
  for (const auto& d : rep.decisions)
    for (std::size_t i = 0; i < d.outputs.size(); ++i)
      out << d.period << ',' << fleet[i].id << ',' << to_string(d.stages[i]) << ',' << format_double(d.outputs[i]) << '\n';
}

inline void write_census_csv(const SimulationReport& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << "period,off,prepare,ramp_up,on,ramp_down\n";
  for (std::size_t t = 0; t < rep.state_census.size(); ++t) {
    out << t;
    for (auto c : rep.state_census[t]) out << ',' << c;
    out << '\n';
  }
}

inline nlohmann::json report_to_json(const SimulationReport& rep, const Fleet& fleet) {
  nlohmann::json periods = nlohmann::json::array();
  for (const auto& d : rep.decisions) {
    const auto& dg = d.diagnostics;
    periods.push_back({{"period", d.period},
                       {"objective", d.objective},
                       {"lambda", d.lambda},
                       {"k", d.k_selected},
                       {"committed", std::count(d.committed.begin(), d.committed.end(), 1)},
                       {"starting", std::count(d.starting.begin(), d.starting.end(), 1)},
                       {"stopping", std::count(d.stopping.begin(), d.stopping.end(), 1)},
                       {"relax_status", std::string(to_string(dg.relax_status))},
                       {"relax_kkt", std::isfinite(dg.relax_kkt) ? nlohmann::json(dg.relax_kkt) : nlohmann::json(nullptr)},
                       {"sweep_width", dg.sweep_width},
                       {"shortfall", dg.shortfall}});
  }
  nlohmann::json flags = nlohmann::json::array();
  for (const auto& [t, f] : rep.flags) flags.push_back({{"period", t}, {"flag", f}});
  return {{"model", std::string(to_string(rep.model))},
          {"generators", fleet.size()},
          {"periods", rep.decisions.size()},
          {"warmup_periods", rep.warmup_periods},
          {"total_objective_excl_warmup", rep.total_objective_excl_warmup},
          {"objective_per_generator", rep.objective_per_generator},
          {"wall_time_seconds", rep.wall_time},
          {"no_ramping_steps_after_warmup", rep.no_ramping_steps},
          {"starts_after_warmup", rep.starts_after_warmup},
          {"shortfall_periods_after_warmup", rep.shortfall_after_warmup},
          {"flags", std::move(flags)},
          {"per_period", std::move(periods)}};
}

inline void write_report_json(const SimulationReport& rep, const Fleet& fleet, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << report_to_json(rep, fleet).dump(2) << '\n';
}

}  // namespace rruc
