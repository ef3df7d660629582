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

// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all
// pass. Usage: rruc_acceptance <path-to-rruc-cli> [work-dir]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rruc/bench.hpp"
#include "rruc/oracle.hpp"
#include "rruc/ramp.hpp"
#include "rruc/sim.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace rruc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1 -------------------------------------------------------------------------
Outcome dispatch_vs_grid() {
  SplitMix rng(101);
  double worst_p = 0.0, worst_obj = 0.0, solve_time = 0.0;
  int infeasible = 0;
  const auto t0 = Clock::now();
  for (int k = 0; k < 200; ++k) {
    const int n = static_cast<int>(rng.integer(3, 20));
    const auto pb = testing::random_dispatch_problem(rng, n);
    const auto ts = Clock::now();
    const Dispatch d = economic_dispatch(pb);
    solve_time += seconds_since(ts);
    const auto ref = testing::grid_search_dispatch(pb.units, pb.demand);
    if (!d.feasible) ++infeasible;
    for (int j = 0; j < n; ++j) worst_p = std::max(worst_p, std::abs(d.outputs[j] - ref.outputs[j]));
    worst_obj = std::max(worst_obj, std::abs(d.objective - ref.objective) / ref.objective);
  }
  const double total = seconds_since(t0);
  return {infeasible == 0 && worst_p <= 0.05 && worst_obj <= 1e-4 && total < 10.0,
          fmt("200 instances, max |dP| %.4f MW (<= 0.05), max rel obj %.2e (<= 1e-4), dispatch %.3f s, with oracle %.2f s (< 10)",
              worst_p, worst_obj, solve_time, total)};
}

// 2 -------------------------------------------------------------------------
Outcome oracle_gap() {
  const auto t0 = Clock::now();
  const OracleComparison cmp = compare_with_oracle(12, 50, 0);
  const double t = seconds_since(t0);
  std::size_t above = 0;
  for (double g : cmp.gaps) above += g > 0.06 ? 1 : 0;
  return {above == 0 && t < 120.0,
          fmt("50 instances x 12 units: max gap %.2f%%, median %.3f%%, %zu above 6%%, floor-flagged %zu, %.1f s",
              100.0 * cmp.max_gap, 100.0 * cmp.median_gap, above, cmp.floor_flagged, t)};
}

// 3 and 4 share one study per model -----------------------------------------
struct Studies {
  ScalingReport runtime, piecewise, smooth;
  double seconds = 0.0;
};

Studies run_studies() {
  Studies s;
  const std::vector<int> mult{1, 2, 4, 8, 16};
  const Fleet base = reconstructed_base_fleet();
  const auto t0 = Clock::now();
  s.runtime = scaling_study(base, mult, UcModel::runtime);
  s.piecewise = scaling_study(base, mult, UcModel::ramp_piecewise);
  s.smooth = scaling_study(base, mult, UcModel::ramp_smooth);
  s.seconds = seconds_since(t0);
  return s;
}

std::string list(const std::vector<double>& v, const char* f = "%.3f") {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ",") + fmt(f, x);
  return out;
}

Outcome scaling(const Studies& s) {
  const double e1 = s.runtime.fitted_exponent, e2 = s.piecewise.fitted_exponent, e3 = s.smooth.fitted_exponent;
  return {e1 <= 1.9 && e2 <= 1.9 && e3 <= 1.9 && s.seconds < 1800.0,
          fmt("n=42..672, 2 days: exponent runtime %.3f, ramp piecewise %.3f, ramp smooth %.3f (<= 1.9), %.1f s", e1, e2,
              e3, s.seconds)};
}

Outcome drift(const Studies& s) {
  double worst = 0.0;
  for (double r : s.runtime.per_doubling_objective_ratio) worst = std::max(worst, r);
  return {worst <= 1.05, fmt("runtime per-doubling objective ratios [%s] (<= 1.05); ramp piecewise [%s], smooth [%s] (reported)",
                             list(s.runtime.per_doubling_objective_ratio, "%.4f").c_str(),
                             list(s.piecewise.per_doubling_objective_ratio, "%.4f").c_str(),
                             list(s.smooth.per_doubling_objective_ratio, "%.4f").c_str())};
}

// 5 -------------------------------------------------------------------------
Outcome replay() {
  const Fleet f = reconstructed_base_fleet();
  const DemandTrace tr = scaled_demand(1.0, 8, 5, 0);
  bool ok = true;
  std::string detail = "8 days, 5 min, 42 units:";
  for (UcModel m : {UcModel::runtime, UcModel::ramp_piecewise, UcModel::ramp_smooth}) {
    const SimulationReport rep = run_simulation(f, tr, m);
    const ReplayReport r = replay_validate(f, tr, rep.decisions, m);
    ok = ok && r.ok() && rep.shortfall_after_warmup == 0;
    detail += fmt(" %s %zu violations (%zu flagged warm-up shortfall, %zu after);", std::string(to_string(m)).c_str(),
                  r.violations.size(), r.flagged_shortfall - rep.shortfall_after_warmup, rep.shortfall_after_warmup);
  }
  return {ok, detail};
}

// 6 -------------------------------------------------------------------------
Outcome smooth_profile() {
  SplitMix rng(606);
  int strict = 0, longer = 0;
  const double dts[] = {1, 5, 10, 15, 30, 60};
  for (int k = 0; k < 1000; ++k) {
    GeneratorSpec g;
    g.id = "p";
    g.p_max = 500.0;
    g.p_min = rng.uniform(1.0, 400.0);
    g.cost = {0.01, 20.0, 100.0};
    g.ramp_up_rate = g.ramp_down_rate = rng.uniform(0.2, 50.0);
    const double sd = rng.uniform(0.0, 720.0);
    g.start_durations = {sd, sd, sd};
    g.start_costs = {1000.0, 1000.0, 1000.0};
    const double dt = dts[rng.integer(0, 5)];
    const RampProfile p = ramp_durations(g, dt, 0.0, RampKind::smooth);
    longer += p.t_combined > p.t_prepare + p.t_up ? 1 : 0;
    strict += p.t_combined < p.t_prepare + p.t_up ? 1 : 0;
  }
  return {longer == 0 && strict > 0,
          fmt("1000 tuples: combined longer in %d, strictly shorter in %d", longer, strict)};
}

// 7 -------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const std::string& cli, const fs::path& work) {
  bool ok = true;
  std::string detail;
  for (const char* model : {"runtime", "ramp_piecewise"}) {
    std::vector<std::string> files;
    int run = 0;
    for (const char* par : {"false", "false", "true", "true"}) {
      const fs::path out = work / (std::string(model) + "_" + std::to_string(run++));
      fs::remove_all(out);
      const std::string cmd = "\"" + cli + "\" simulate --model " + model + " --seed 3 --parallel " + par +
                              " --out \"" + out.string() + "\" > /dev/null";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) {
        ok = false;
        detail += fmt(" %s run exit %d;", model, rc);
      }
      files.push_back(slurp(out / "decisions.csv"));
    }
    bool same = !files[0].empty();
    for (const auto& f : files) same = same && f == files[0];
    ok = ok && same;
    detail += fmt(" %s: 4 runs (parallel off x2, on x2) %s, %zu bytes;", model, same ? "identical" : "DIFFER", files[0].size());
  }
  return {ok, detail};
}

// 8 -------------------------------------------------------------------------
Outcome relaxation_kkt() {
  SplitMix rng(808);
  double worst = 0.0;
  int not_converged = 0;
  for (int k = 0; k < 100; ++k) {
    auto pb = testing::random_relaxed_problem(rng, static_cast<int>(rng.integer(2, 40)), static_cast<int>(rng.integer(0, 4)),
                                              1.0 / 12.0);
    if (k % 3 == 0) pb.floor_target *= 0.8;
    const RelaxedSolution sol = solve_relaxed(pb);
    not_converged += sol.status == RelaxStatus::converged ? 0 : 1;
    worst = std::max(worst, testing::finite_difference_kkt(pb, sol));
  }
  return {worst <= 1e-4 && not_converged == 0,
          fmt("100 instances: max finite-difference KKT residual %.2e (<= 1e-4), %d not converged", worst, not_converged)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <rruc-cli> [work-dir]\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "rruc_acceptance";
  fs::create_directories(work);

  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "dispatch vs grid oracle", dispatch_vs_grid);
  report(2, "relax-and-round vs exhaustive", oracle_gap);
  Studies studies;
  std::string study_error;
  try {
    studies = run_studies();
  } catch (const std::exception& e) {
    study_error = e.what();
  }
  auto with_studies = [&](Outcome (*fn)(const Studies&)) {
    return [&, fn] { return study_error.empty() ? fn(studies) : Outcome{false, "scaling study failed: " + study_error}; };
  };
  report(3, "scaling exponent", with_studies(scaling));
  report(4, "objective drift", with_studies(drift));
  report(5, "feasibility replay", replay);
  report(6, "smooth profile", smooth_profile);
  report(7, "determinism", [&] { return determinism(cli, work); });
  report(8, "relaxation stationarity", relaxation_kkt);
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
