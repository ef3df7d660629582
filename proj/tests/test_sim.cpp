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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rruc/bench.hpp"
#include "rruc/sim.hpp"
#include "support/desk.hpp"

namespace rruc {
namespace {

using testing::unit;

TEST(Simulation, EightDaysOfFiveMinutes) {
  const Fleet f = reconstructed_base_fleet();
  const DemandTrace tr = scaled_demand(1.0, 8, 5, 0);
  const SimulationReport rep = run_simulation(f, tr, UcModel::runtime);
  EXPECT_EQ(rep.decisions.size(), 2304u);
  EXPECT_EQ(rep.warmup_periods, 288u);
  for (const auto& c : rep.state_census) {
    std::size_t n = 0;
    for (auto v : c) n += v;
    ASSERT_EQ(n, f.size());
  }
  EXPECT_TRUE(replay_validate(f, tr, rep.decisions, rep.model).ok());
}

// Constant demand and plenty of capacity: after warm-up nothing starts and
// each period costs exactly its dispatch.
TEST(Simulation, SteadyStateAfterWarmup) {
  std::vector<GeneratorSpec> units;
  for (int i = 0; i < 6; ++i) units.push_back(unit("u" + std::to_string(i), 20, 100 + 10 * i, 60));
  const Fleet f(units);
  const DemandTrace tr(15, std::vector<double>(2 * 96, 180.0), 5.0);
  const SimulationReport rep = run_simulation(f, tr, UcModel::runtime);
  EXPECT_EQ(rep.starts_after_warmup, 0u);
  double day2 = 0.0;
  for (std::size_t t = 96; t < tr.horizon(); ++t) {
    const auto& d = rep.decisions[t];
    for (std::size_t i = 0; i < f.size(); ++i)
      if (d.committed[i]) day2 += f[i].cost.scaled(0.25)(d.outputs[i]);
  }
  EXPECT_NEAR(rep.total_objective_excl_warmup, day2, 1e-9 * day2);
  EXPECT_DOUBLE_EQ(rep.objective_per_generator, rep.total_objective_excl_warmup / 6.0);
}

TEST(Simulation, NeedsTwoDays) {
  const Fleet f = testing::desk_fleet(4);
  EXPECT_THROW(run_simulation(f, testing::desk_trace(f, 1), UcModel::runtime), ArgumentError);
}

TEST(Simulation, CensusDiff) {
  const Fleet f = testing::desk_fleet(6, 7);
  const DemandTrace tr = testing::desk_trace(f, 2);
  const SimulationReport a = run_simulation(f, tr, UcModel::ramp_piecewise);
  for (const auto& row : state_census_diff(a, a))
    for (long v : row) ASSERT_EQ(v, 0);
  SimulationReport b = a;
  // One unit leaves prepare a period later.
  b.state_census[10][static_cast<std::size_t>(Stage::prepare)] += 1;
  b.state_census[10][static_cast<std::size_t>(Stage::ramp_up)] -= 1;
  const auto diff = state_census_diff(a, b);
  EXPECT_EQ(diff[10][static_cast<std::size_t>(Stage::prepare)], -1);
  EXPECT_EQ(diff[10][static_cast<std::size_t>(Stage::ramp_up)], 1);
  EXPECT_EQ(diff[9], (std::array<long, 5>{}));
  b.state_census.pop_back();
  EXPECT_THROW(state_census_diff(a, b), ArgumentError);
}

TEST(Simulation, ParallelSweepIsIdentical) {
  const Fleet f = synthesize_fleet(reconstructed_base_fleet(), 2, 4);
  const DemandTrace tr = scaled_demand(2.0, 2, 5, 4);
  UcConfig par;
  par.sweep.parallel = true;
  for (UcModel m : {UcModel::runtime, UcModel::ramp_smooth}) {
    const SimulationReport a = run_simulation(f, tr, m), b = run_simulation(f, tr, m, par);
    for (std::size_t t = 0; t < a.decisions.size(); ++t) {
      ASSERT_EQ(a.decisions[t].outputs, b.decisions[t].outputs) << "period " << t;
      ASSERT_EQ(a.decisions[t].objective, b.decisions[t].objective);
    }
  }
}

TEST(Simulation, OutputFiles) {
  const Fleet f = testing::desk_fleet(5);
  const DemandTrace tr = testing::desk_trace(f, 2, 0.75, 60);
  const SimulationReport rep = run_simulation(f, tr, UcModel::runtime);
  const auto dir = std::filesystem::temp_directory_path() / "rruc_sim_files";
  std::filesystem::create_directories(dir);
  write_decisions_csv(rep, f, (dir / "decisions.csv").string());
  write_census_csv(rep, (dir / "census.csv").string());
  write_report_json(rep, f, (dir / "report.json").string());
  std::ifstream dec(dir / "decisions.csv");
  std::string line;
  std::getline(dec, line);
  EXPECT_EQ(line, "period,unit,stage,output");
  std::size_t rows = 0;
  while (std::getline(dec, line)) ++rows;
  EXPECT_EQ(rows, tr.horizon() * f.size());
  std::ifstream js(dir / "report.json");
  const auto j = nlohmann::json::parse(js);
  EXPECT_EQ(j.at("periods").get<std::size_t>(), tr.horizon());
  EXPECT_EQ(j.at("per_period").size(), tr.horizon());
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.0, 1.0 / 3.0, 123456.789, 1e-300, -2.5}) EXPECT_EQ(std::stod(format_double(v)), v);
}

// --- bench -----------------------------------------------------------------

TEST(PowerLaw, ExactAndFlat) {
  const std::vector<double> n{10, 20, 40, 80, 160};
  std::vector<double> t, flat(5, 3.0);
  for (double x : n) t.push_back(std::pow(x, 1.5));
  EXPECT_NEAR(fit_power_law(n, t), 1.5, 1e-9);
  EXPECT_NEAR(fit_power_law(n, flat), 0.0, 1e-12);
}

TEST(PowerLaw, ScaleInvariant) {
  const std::vector<double> n{42, 84, 168, 336};
  const std::vector<double> t{0.1, 0.31, 0.7, 2.2};
  std::vector<double> t2;
  for (double x : t) t2.push_back(x * 37.0);
  EXPECT_NEAR(fit_power_law(n, t), fit_power_law(n, t2), 1e-12);
}

// Synthetic timings with 5% multiplicative noise recover the generating slope.
TEST(PowerLaw, NoisyRecovery) {
  SplitMix rng(5);
  std::vector<double> n, t;
  for (int k = 0; k < 12; ++k) {
    n.push_back(42.0 * std::pow(2.0, k));
    t.push_back(0.003 * std::pow(n.back(), 1.37) * (1.0 + 0.05 * (2.0 * rng.unit() - 1.0)));
  }
  EXPECT_NEAR(fit_power_law(n, t), 1.37, 0.1);
}

TEST(PowerLaw, RejectsBadInput) {
  const std::vector<double> two{1, 2}, three{1, 2, 4}, bad{1, 0, 4};
  EXPECT_THROW(fit_power_law(two, two), ArgumentError);
  EXPECT_THROW(fit_power_law(three, bad), ArgumentError);
  EXPECT_THROW(fit_power_law(bad, three), ArgumentError);
}

TEST(ScalingStudy, RowsBySize) {
  const std::vector<int> m{4, 1, 2};
  const ScalingReport rep = scaling_study(reconstructed_base_fleet(), m, UcModel::runtime);
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_EQ(rep.rows[0].n, 42u);
  EXPECT_EQ(rep.rows[1].n, 84u);
  EXPECT_EQ(rep.rows[2].n, 168u);
  EXPECT_TRUE(std::isfinite(rep.fitted_exponent));
  ASSERT_EQ(rep.per_doubling_objective_ratio.size(), 2u);
  EXPECT_DOUBLE_EQ(rep.per_doubling_objective_ratio[0], rep.rows[1].objective_per_gen / rep.rows[0].objective_per_gen);
  // Objective column is reproducible.
  const ScalingReport again = scaling_study(reconstructed_base_fleet(), m, UcModel::runtime);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(rep.rows[i].objective_per_gen, again.rows[i].objective_per_gen);
  EXPECT_NE(scaling_svg(rep).find("<svg"), std::string::npos);
  EXPECT_THROW(scaling_study(reconstructed_base_fleet(), std::vector<int>{1, 2}, UcModel::runtime), ArgumentError);
}

TEST(ScalingStudy, RatiosNormalisePerDoubling) {
  const std::vector<ScalingRow> rows{{10, 1.0, 1.0, 0}, {40, 16.0, 1.21, 0}};
  const auto r = per_doubling_ratios(rows, &ScalingRow::seconds);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0], 4.0, 1e-12);
  EXPECT_NEAR(per_doubling_ratios(rows, &ScalingRow::objective_per_gen)[0], 1.1, 1e-12);
}

}  // namespace
}  // namespace rruc
