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

// Command-line driver. Exit codes: 0 success, 1 shortfall or failed check,
// 2 usage or input error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rruc/bench.hpp"
#include "rruc/config.hpp"
#include "rruc/oracle.hpp"
#include "rruc/sim.hpp"

namespace fs = std::filesystem;
using namespace rruc;

namespace {

constexpr int kExitShortfall = 1;
constexpr int kExitUsage = 2;

// Flags that may override the config file. Unset flags leave it alone.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> model;
  std::optional<std::string> fleet;
  std::optional<int> multiplier;
  std::optional<std::string> demand;
  std::optional<int> dt;
  std::optional<int> days;
  std::optional<double> sigma_gw;
  std::optional<double> beta;
  std::optional<std::string> multipliers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<bool> parallel;
  std::optional<std::size_t> units;
  std::optional<std::size_t> instances;
};

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    const std::string tok = s.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw ArgumentError("bad integer list '" + s + "'");
    }
    pos = comma + 1;
  }
  return out;
}

RunConfig resolve(const Overrides& o) {
  RunConfig c;
  if (o.config) apply_toml(c, load_toml(*o.config));
  if (o.model) c.model = model_from_string(*o.model);
  if (o.fleet) c.fleet_file = *o.fleet;
  if (o.multiplier) {
    if (o.fleet) throw ArgumentError("--fleet and --multiplier are exclusive");
    c.fleet_file.reset();
    c.fleet_multiplier = *o.multiplier;
  }
  if (o.demand) c.demand_file = *o.demand;
  if (o.dt) c.dt = *o.dt;
  if (o.days) c.days = *o.days;
  if (o.sigma_gw) c.sigma_gw = *o.sigma_gw;
  if (o.beta) c.beta = *o.beta;
  if (o.multipliers) c.multipliers = parse_int_list(*o.multipliers);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  if (o.parallel) c.sweep.parallel = *o.parallel;
  if (o.units) c.oracle_units = *o.units;
  if (o.instances) c.oracle_instances = *o.instances;
  validate(c);
  return c;
}

fs::path prepare_out(const RunConfig& c) {
  fs::path dir(c.out);
  fs::create_directories(dir);
  std::ofstream echo(dir / "config.echo.json");
  if (!echo) throw FormatError("cannot write into '" + c.out + "'");
  echo << to_json(c).dump(2) << '\n';
  return dir;
}

Fleet fleet_of(const RunConfig& c) {
  if (c.fleet_file) return load_fleet(*c.fleet_file);
  return synthesize_fleet(reconstructed_base_fleet(), c.fleet_multiplier, c.seed);
}

// Fleet size relative to the 22-copy reference drives demand and sigma.
double reference_fraction(const Fleet& f) {
  return static_cast<double>(f.size()) / (reconstructed_base_fleet().size() * kReferenceMultiplier);
}

DemandTrace demand_of(const RunConfig& c, const Fleet& f) {
  const double frac = reference_fraction(f);
  if (c.demand_file) return load_demand_csv(*c.demand_file, c.dt, c.sigma_gw * 1000.0 * frac);
  return scaled_demand(frac * kReferenceMultiplier, c.days, c.dt, c.seed, c.sigma_gw * 1000.0);
}

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "TOML config file; flags override it");
  app->add_option("--seed", o.seed, "Random seed (default 0)");
  app->add_option("--out", o.out, "Output directory (default ./out)");
}

void add_run_flags(CLI::App* app, Overrides& o) {
  app->add_option("--model", o.model, "runtime | ramp_piecewise | ramp_smooth");
  app->add_option("--fleet", o.fleet, "Fleet JSON file");
  app->add_option("--multiplier", o.multiplier, "Synthetic fleet: copies of the base fleet");
  app->add_option("--demand", o.demand, "Demand CSV (period_index,demand_mw)");
  app->add_option("--dt", o.dt, "Period length in minutes");
  app->add_option("--days", o.days, "Synthetic trace length in days");
  app->add_option("--sigma-gw", o.sigma_gw, "Forecast sigma in GW at the 924-unit reference size");
  app->add_option("--beta", o.beta, "Start weight on average cost (ramp models)");
  app->add_option("--parallel", o.parallel, "Parallel sweep (true/false)");
}

int cmd_synth_fleet(const RunConfig& c) {
  const fs::path dir = prepare_out(c);
  const Fleet f = synthesize_fleet(reconstructed_base_fleet(), c.fleet_multiplier, c.seed);
  save_fleet(f, (dir / "fleet.json").string());
  std::printf("wrote %zu generators to %s\n", f.size(), (dir / "fleet.json").c_str());
  return 0;
}

int cmd_synth_demand(const RunConfig& c) {
  const fs::path dir = prepare_out(c);
  const Fleet f = fleet_of(c);
  const DemandTrace tr = demand_of(c, f);
  save_demand_csv(tr, (dir / "demand.csv").string());
  std::printf("wrote %zu periods (sigma %.1f MW) to %s\n", tr.horizon(), tr.sigma_d, (dir / "demand.csv").c_str());
  return 0;
}

int cmd_simulate(const RunConfig& c) {
  const fs::path dir = prepare_out(c);
  const Fleet f = fleet_of(c);
  const DemandTrace tr = demand_of(c, f);
  const SimulationReport rep = run_simulation(f, tr, c.model, c.uc_config());
  write_report_json(rep, f, (dir / "report.json").string());
  write_decisions_csv(rep, f, (dir / "decisions.csv").string());
  write_census_csv(rep, (dir / "census.csv").string());
  const ReplayReport replay = replay_validate(f, tr, rep.decisions, c.model);
  std::printf("model %s, %zu generators, %zu periods, %.2f s\n", std::string(to_string(c.model)).c_str(), f.size(),
              rep.decisions.size(), rep.wall_time);
  std::printf("objective after warm-up %.6g $ (%.6g $ per generator)\n", rep.total_objective_excl_warmup,
              rep.objective_per_generator);
  std::printf("steps without ramping units after warm-up: %zu of %zu\n", rep.no_ramping_steps,
              rep.decisions.size() - rep.warmup_periods);
  std::printf("replay: %zu violations, %zu flagged shortfall periods (%zu after warm-up)\n", replay.violations.size(),
              replay.flagged_shortfall, rep.shortfall_after_warmup);
  for (std::size_t i = 0; i < std::min<std::size_t>(replay.violations.size(), 10); ++i) {
    const auto& v = replay.violations[i];
    std::printf("  %s period %zu unit %s: %s\n", std::string(to_string(v.kind)).c_str(), v.period, f[v.unit].id.c_str(), v.detail.c_str());
  }
  return replay.ok() && rep.shortfall_after_warmup == 0 ? 0 : kExitShortfall;
}

int cmd_bench(const RunConfig& c, bool days_set) {
  const fs::path dir = prepare_out(c);
  ScalingOptions opt;
  opt.days = days_set ? c.days : 2;
  opt.dt = c.dt;
  opt.seed = c.seed;
  opt.sigma_mw_reference = c.sigma_gw * 1000.0;
  opt.progress = [](const ScalingRow& r) {
    std::printf("n=%zu  %.3f s  %.6g $/gen\n", r.n, r.seconds, r.objective_per_gen);
    std::fflush(stdout);
  };
  const Fleet base = c.fleet_file ? load_fleet(*c.fleet_file) : reconstructed_base_fleet();
  const ScalingReport rep = scaling_study(base, c.multipliers, c.model, c.uc_config(), opt);
  write_scaling_csv(rep, (dir / "scaling.csv").string());
  write_scaling_svg(rep, (dir / "scaling.svg").string());
  std::printf("fitted exponent %.3f\n", rep.fitted_exponent);
  for (std::size_t i = 0; i < rep.per_doubling_time_ratio.size(); ++i)
    std::printf("doubling %zu: time x%.3f, objective per generator x%.4f\n", i + 1, rep.per_doubling_time_ratio[i],
                rep.per_doubling_objective_ratio[i]);
  std::size_t shortfall = 0;
  for (const auto& r : rep.rows) shortfall += r.shortfall_periods;
  return shortfall == 0 ? 0 : kExitShortfall;
}

int cmd_oracle(const RunConfig& c) {
  prepare_out(c);
  const OracleComparison cmp = compare_with_oracle(c.oracle_units, c.oracle_instances, c.seed, c.relax, c.sweep);
  std::printf("%zu instances, %zu units: max gap %.4f%%, median gap %.4f%%\n", cmp.gaps.size(), c.oracle_units,
              100.0 * cmp.max_gap, 100.0 * cmp.median_gap);
  std::printf("floor-flagged %zu, emergency %zu, skipped infeasible draws %zu\n", cmp.floor_flagged, cmp.emergency,
              cmp.skipped);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relax-and-round unit commitment"};
  app.require_subcommand(1);
  Overrides o;
  auto* fleet = app.add_subcommand("synth-fleet", "Write a synthetic fleet (fleet.json)");
  auto* demand = app.add_subcommand("synth-demand", "Write a synthetic demand trace (demand.csv)");
  auto* sim = app.add_subcommand("simulate", "Run a rolling simulation");
  auto* bench = app.add_subcommand("bench", "Scaling study over fleet multiples");
  auto* oracle = app.add_subcommand("oracle-compare", "Compare against exhaustive enumeration");
  for (auto* sc : {fleet, demand, sim, bench, oracle}) add_common(sc, o);
  fleet->add_option("--multiplier", o.multiplier, "Copies of the base fleet");
  for (auto* sc : {demand, sim, bench}) add_run_flags(sc, o);
  bench->add_option("--multipliers", o.multipliers, "Comma-separated fleet multiples (default 1,2,4,8,16)");
  oracle->add_option("--units", o.units, "Discretionary units per instance (<= 20)");
  oracle->add_option("--instances", o.instances, "Number of instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  RunConfig cfg;
  try {
    cfg = resolve(o);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  try {
    if (fleet->parsed()) return cmd_synth_fleet(cfg);
    if (demand->parsed()) return cmd_synth_demand(cfg);
    if (sim->parsed()) return cmd_simulate(cfg);
    if (bench->parsed()) return cmd_bench(cfg, o.days.has_value());
    return cmd_oracle(cfg);
  } catch (const FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failed: %s\n", e.what());
    return kExitShortfall;
  }
}
