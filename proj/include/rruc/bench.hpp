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
#include <fstream>
#include <functional>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rruc/sim.hpp"

namespace rruc {

/// Least-squares slope of ln(times) against ln(sizes).
inline double fit_power_law(std::span<const double> sizes, std::span<const double> times) {
  if (sizes.size() != times.size()) throw ArgumentError("sizes and times differ in length");
  if (sizes.size() < 3) throw ArgumentError("power-law fit needs at least three points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] > 0.0) || !(times[i] > 0.0)) throw ArgumentError("power-law fit needs positive inputs");
    mx += std::log(sizes[i]);
    my += std::log(times[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double dx = std::log(sizes[i]) - mx;
    sxy += dx * (std::log(times[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) throw ArgumentError("power-law fit needs at least two distinct sizes");
  return sxy / sxx;
}

struct ScalingRow {
  std::size_t n = 0;
  double seconds = 0.0;
  double objective_per_gen = 0.0;
  std::size_t shortfall_periods = 0;  // after warm-up
};

struct ScalingReport {
  UcModel model = UcModel::runtime;
  std::vector<ScalingRow> rows;
  double fitted_exponent = 0.0;
  std::vector<double> per_doubling_time_ratio;       // between consecutive rows
  std::vector<double> per_doubling_objective_ratio;  // between consecutive rows
};

struct ScalingOptions {
  int days = 2;
  int dt = 5;
  std::uint64_t seed = 0;
  double sigma_mw_reference = kReferenceSigmaMw;
  // Called after each size; lets callers log progress.
  std::function<void(const ScalingRow&)> progress;
};

/// Ratio between consecutive rows, normalised to one doubling of n.
inline std::vector<double> per_doubling_ratios(std::span<const ScalingRow> rows, double ScalingRow::*field) {
  std::vector<double> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double doublings = std::log2(static_cast<double>(rows[i].n) / static_cast<double>(rows[i - 1].n));
    out.push_back(std::pow(rows[i].*field / rows[i - 1].*field, 1.0 / doublings));
  }
  return out;
}

inline ScalingReport scaling_study(const Fleet& base, std::span<const int> multipliers, UcModel model,
                                   const UcConfig& config = {}, const ScalingOptions& opt = {}) {
  if (multipliers.size() < 3) throw ArgumentError("scaling study needs at least three multipliers");
  std::vector<int> mults(multipliers.begin(), multipliers.end());
  std::sort(mults.begin(), mults.end());
  if (std::adjacent_find(mults.begin(), mults.end()) != mults.end()) throw ArgumentError("multipliers must be distinct");

  ScalingReport rep;
  rep.model = model;
  for (int m : mults) {
    const Fleet fleet = synthesize_fleet(base, m, opt.seed);
    const DemandTrace trace = scaled_demand(m * base.base_multiplier, opt.days, opt.dt, opt.seed, opt.sigma_mw_reference);
    SimulationReport sim;
    try {
      sim = run_simulation(fleet, trace, model, config);
    } catch (const Error& e) {
      throw ContractViolation("scaling study at n=" + std::to_string(fleet.size()) + ": " + e.what());
    }
    ScalingRow row{fleet.size(), sim.wall_time, sim.objective_per_generator, sim.shortfall_after_warmup};
    if (opt.progress) opt.progress(row);
    rep.rows.push_back(row);
  }
  std::vector<double> n, t;
  for (const auto& r : rep.rows) {
    n.push_back(static_cast<double>(r.n));
    t.push_back(std::max(r.seconds, 1e-9));
  }
  rep.fitted_exponent = fit_power_law(n, t);
  rep.per_doubling_time_ratio = per_doubling_ratios(rep.rows, &ScalingRow::seconds);
  rep.per_doubling_objective_ratio = per_doubling_ratios(rep.rows, &ScalingRow::objective_per_gen);
  return rep;
}

inline void write_scaling_csv(const ScalingReport& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << "n,seconds,objective_per_gen\n";
  for (const auto& r : rep.rows) out << r.n << ',' << format_double(r.seconds) << ',' << format_double(r.objective_per_gen) << '\n';
}

/// Two panels: log-log runtime against n, and objective per generator against n.
inline std::string scaling_svg(const ScalingReport& rep) {
  constexpr double W = 360, H = 260, L = 60, B = 40, T = 30, R = 15;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  auto panel = [&](double x0, const char* title, bool log_y, auto value) {
    std::vector<double> xs, ys;
    for (const auto& r : rep.rows) {
      xs.push_back(std::log(static_cast<double>(r.n)));
      ys.push_back(log_y ? std::log(std::max(value(r), 1e-9)) : value(r));
    }
    auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
    auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
    const double xa = *xlo, xb = *xhi > *xlo ? *xhi : *xlo + 1.0;
    const double pad = 0.05 * std::max(*yhi - *ylo, 1e-12);
    const double ya = *ylo - pad, yb = *yhi + pad;
    auto px = [&](double x) { return x0 + L + (x - xa) / (xb - xa) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ya) / (yb - ya) * (H - B - T); };
    s << "<text x=\"" << x0 + W / 2 << "\" y=\"18\" text-anchor=\"middle\">" << title << "</text>\n";
    s << "<rect x=\"" << x0 + L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - B - T
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) s << px(xs[i]) << ',' << py(ys[i]) << ' ';
    s << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      s << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(ys[i]) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
      s << "<text x=\"" << px(xs[i]) << "\" y=\"" << H - B + 14 << "\" text-anchor=\"middle\">" << rep.rows[i].n << "</text>\n";
    }
    s << "<text x=\"" << x0 + W / 2 << "\" y=\"" << H - 6 << "\" text-anchor=\"middle\">generators (log scale)</text>\n";
  };
  std::ostringstream t1;
  t1 << "runtime [s], log-log, slope " << std::fixed << std::setprecision(2) << rep.fitted_exponent;
  panel(0.0, t1.str().c_str(), true, [](const ScalingRow& r) { return r.seconds; });
  panel(W, "objective per generator [$]", false, [](const ScalingRow& r) { return r.objective_per_gen; });
  s << "</svg>\n";
  return s.str();
}

inline void write_scaling_svg(const ScalingReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << scaling_svg(rep);
}

}  // namespace rruc
