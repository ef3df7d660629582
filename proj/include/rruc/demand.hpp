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
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rruc/error.hpp"
#include "rruc/random.hpp"

namespace rruc {

constexpr int kMinutesPerDay = 1440;
constexpr int kForecastMinutes = 72 * 60;

/// Demand per period. `dt` is minutes per period, `sigma_d` the forecast
/// standard deviation in MW.
struct DemandTrace {
  int dt = 5;
  std::vector<double> values;
  double sigma_d = 0.0;

  DemandTrace() = default;
  DemandTrace(int dt_minutes, std::vector<double> v, double sigma)
      : dt(dt_minutes), values(std::move(v)), sigma_d(sigma) {
    if (dt <= 0) throw ArgumentError("demand period length must be positive");
    for (double x : values)
      if (!(x > 0.0) || !std::isfinite(x)) throw ArgumentError("demand values must be positive");
  }

  std::size_t horizon() const noexcept { return values.size(); }
  std::size_t periods_per_day() const noexcept { return static_cast<std::size_t>(kMinutesPerDay / dt); }

  DemandTrace scaled(double factor) const {
    DemandTrace out = *this;
    for (double& v : out.values) v *= factor;
    out.sigma_d *= factor;
    return out;
  }
};

struct ForecastWindow {
  double d_now = 0.0;
  double d_min_72 = 0.0;
  double d_max_72 = 0.0;
  double sigma_d = 0.0;
};

/// Number of periods covered by the 72 h look-ahead, including the current one.
inline std::size_t forecast_window_periods(int dt) {
  return static_cast<std::size_t>(std::max(1, (kForecastMinutes + dt - 1) / dt));
}

/// Diurnal trace with its trough (`low`) at 04:00 every day and its crest
/// growing towards `peak` at 16:00 on the second-to-last day. The seed only
/// perturbs the non-peak daily crests by up to 3%.
inline DemandTrace synthesize_demand(double low, double peak, int days, int dt, std::uint64_t seed) {
  if (!(low > 0.0) || !(low < peak)) throw ArgumentError("demand synthesis requires 0 < low < peak");
  if (days < 1) throw ArgumentError("demand synthesis requires at least one day");
  if (dt <= 0 || 60 % dt != 0) throw ArgumentError("period length must divide 60 minutes");

  const int peak_day = days >= 2 ? days - 2 : 0;
  const double swing = peak - low;
  SplitMix rng(seed);
  std::vector<double> knot_time(days), knot_amp(days);
  for (int d = 0; d < days; ++d) {
    double g = 1.0;
    if (d < peak_day)
      g = 0.62 + 0.25 * static_cast<double>(d) / peak_day;
    else if (d > peak_day)
      g = 0.80;
    if (d != peak_day) g *= 1.0 + 0.03 * (2.0 * rng.unit() - 1.0);
    knot_time[d] = d * kMinutesPerDay + 16 * 60;
    knot_amp[d] = swing * g;
  }
  auto amplitude = [&](double minute) {
    if (minute <= knot_time.front()) return knot_amp.front();
    if (minute >= knot_time.back()) return knot_amp.back();
    const auto d = static_cast<std::size_t>((minute - knot_time.front()) / kMinutesPerDay);
    const double w = (minute - knot_time[d]) / kMinutesPerDay;
    return knot_amp[d] + w * (knot_amp[d + 1] - knot_amp[d]);
  };

  const std::size_t n = static_cast<std::size_t>(days) * kMinutesPerDay / dt;
  std::vector<double> values(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double minute = static_cast<double>(t) * dt;
    const double phase = 2.0 * std::numbers::pi * (minute - 4 * 60) / kMinutesPerDay;
    values[t] = low + amplitude(minute) * 0.5 * (1.0 - std::cos(phase));
  }
  return DemandTrace(dt, std::move(values), 0.0);
}

/// Demand now plus extremes over the next 72 h (clipped at the trace end).
inline ForecastWindow forecast_stats(const DemandTrace& trace, std::size_t t, double base_sigma,
                                     double demand_multiplier) {
  if (t >= trace.horizon())
    throw IndexError("period " + std::to_string(t) + " outside trace of " +
                     std::to_string(trace.horizon()) + " periods");
  const std::size_t end = std::min(trace.horizon(), t + forecast_window_periods(trace.dt));
  const auto first = trace.values.begin() + static_cast<std::ptrdiff_t>(t);
  const auto last = trace.values.begin() + static_cast<std::ptrdiff_t>(end);
  const auto [lo, hi] = std::minmax_element(first, last);
  return {trace.values[t], *lo, *hi, base_sigma * demand_multiplier};
}

// ---------------------------------------------------------------------------
// Demand CSV: `period_index,demand_mw` with a header row.

inline DemandTrace load_demand_csv(const std::string& path, int dt, double sigma_d) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open demand file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("demand file '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "period_index,demand_mw")
    throw FormatError("demand file '" + path + "': header must be 'period_index,demand_mw'");
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("demand file row " + std::to_string(row) + ": expected two columns");
    try {
      const long idx = std::stol(line.substr(0, comma));
      const double v = std::stod(line.substr(comma + 1));
      if (idx != static_cast<long>(row))
        throw FormatError("demand file row " + std::to_string(row) + ": period indices must be consecutive from 0");
      values.push_back(v);
    } catch (const std::logic_error&) {
      throw FormatError("demand file row " + std::to_string(row) + ": not numeric");
    }
    ++row;
  }
  try {
    return DemandTrace(dt, std::move(values), sigma_d);
  } catch (const ArgumentError& e) {
    throw FormatError("demand file '" + path + "': " + e.what());
  }
}

inline void save_demand_csv(const DemandTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write demand file '" + path + "'");
  out << "period_index,demand_mw\n" << std::setprecision(17);
  for (std::size_t t = 0; t < trace.horizon(); ++t) out << t << ',' << trace.values[t] << '\n';
}

}  // namespace rruc
