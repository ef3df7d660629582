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
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "rruc/error.hpp"
#include "rruc/random.hpp"

namespace rruc {

/// Hourly cost a*P^2 + b*P + c of running a unit at output P (MW).
struct CostCurve {
  double a = 0.0;  // $/MW^2 h
  double b = 0.0;  // $/MWh
  double c = 0.0;  // $/h while committed

  double operator()(double p) const noexcept { return (a * p + b) * p + c; }
  double marginal(double p) const noexcept { return 2.0 * a * p + b; }

  CostCurve scaled(double factor) const noexcept { return {a * factor, b * factor, c * factor}; }

  friend bool operator==(const CostCurve&, const CostCurve&) = default;
};

enum class Fuel { coal, gas };

inline const char* to_string(Fuel f) { return f == Fuel::coal ? "coal" : "gas"; }

enum class StartType { hot, warm, cold };

/// One value per start type, ordered hot <= warm <= cold.
struct StartTriple {
  double hot = 0.0;
  double warm = 0.0;
  double cold = 0.0;

  double operator[](StartType t) const noexcept {
    switch (t) {
      case StartType::hot: return hot;
      case StartType::warm: return warm;
      case StartType::cold: return cold;
    }
    return cold;
  }
  bool ordered() const noexcept { return hot <= warm && warm <= cold; }

  friend bool operator==(const StartTriple&, const StartTriple&) = default;
};

/// Physical and economic description of one generating unit. Rates are MW/min,
/// durations minutes, costs dollars.
struct GeneratorSpec {
  std::string id;
  CostCurve cost;
  double p_min = 0.0;
  double p_max = 0.0;
  Fuel fuel = Fuel::gas;
  double ramp_up_rate = 0.0;
  double ramp_down_rate = 0.0;
  double min_runtime = 0.0;
  int max_daily_starts = 1;
  StartTriple start_durations;
  StartTriple start_costs;
  double shutdown_cost = 0.0;

  /// Typical output during a peak event.
  double p_typ() const noexcept { return (4.0 * p_max + p_min) / 5.0; }

  /// Average cost per MWh at p_typ; the priority-list key.
  double average_cost_at_typ() const noexcept {
    const double pt = p_typ();
    return cost.a * pt + cost.b + cost.c / pt;
  }

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

/// Throws ArgumentError naming the first violated invariant.
inline void validate(const GeneratorSpec& g) {
  auto fail = [&](const std::string& what) {
    throw ArgumentError("generator '" + g.id + "': " + what);
  };
  if (!(g.p_min > 0.0) || !(g.p_min <= g.p_max)) fail("requires 0 < p_min <= p_max");
  if (!(g.ramp_up_rate > 0.0) || !(g.ramp_down_rate > 0.0)) fail("ramp rates must be positive");
  if (!(g.min_runtime >= 0.0)) fail("min_runtime must be non-negative");
  if (g.max_daily_starts < 1) fail("max_daily_starts must be >= 1");
  if (!g.start_costs.ordered()) fail("start costs must be ordered hot <= warm <= cold");
  if (!g.start_durations.ordered()) fail("start durations must be ordered hot <= warm <= cold");
  if (!(g.cost.a >= 0.0)) fail("cost curvature must be non-negative");
  for (double v : {g.cost.a, g.cost.b, g.cost.c, g.shutdown_cost})
    if (!std::isfinite(v)) fail("cost coefficients must be finite");
}

struct Fleet {
  std::vector<GeneratorSpec> generators;
  int base_multiplier = 1;
  double total_p_max = 0.0;

  Fleet() = default;
  explicit Fleet(std::vector<GeneratorSpec> gens, int multiplier = 1)
      : generators(std::move(gens)), base_multiplier(multiplier) {
    std::set<std::string> ids;
    for (const auto& g : generators) {
      validate(g);
      if (!ids.insert(g.id).second) throw ArgumentError("duplicate generator id '" + g.id + "'");
      total_p_max += g.p_max;
    }
  }

  std::size_t size() const noexcept { return generators.size(); }
  const GeneratorSpec& operator[](std::size_t i) const { return generators[i]; }
};

/// Least-squares quadratic through piecewise-linear bid points (MW, $/h).
/// A negative curvature is clamped to zero and the linear part refit.
inline CostCurve fit_quadratic_cost(std::span<const std::pair<double, double>> points) {
  std::vector<double> xs;
  xs.reserve(points.size());
  for (const auto& [p, c] : points) {
    if (!std::isfinite(p) || !std::isfinite(c)) throw ArgumentError("bid points must be finite");
    xs.push_back(p);
  }
  std::sort(xs.begin(), xs.end());
  const auto distinct = std::unique(xs.begin(), xs.end()) - xs.begin();
  if (distinct < 3) throw DegenerateFitError("quadratic fit needs at least 3 distinct MW values");

  // Scale abscissae to O(1) so the Vandermonde columns are comparable.
  double scale = 0.0;
  for (double x : xs) scale = std::max(scale, std::abs(x));
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double x = points[k].first / scale;
    A(k, 0) = x * x;
    A(k, 1) = x;
    A(k, 2) = 1.0;
    rhs(k) = points[k].second;
  }
  Eigen::Vector3d coef = A.colPivHouseholderQr().solve(rhs);
  CostCurve out{coef(0) / (scale * scale), coef(1) / scale, coef(2)};
  if (out.a < 0.0) {
    Eigen::Vector2d lin = A.rightCols<2>().colPivHouseholderQr().solve(rhs);
    out = {0.0, lin(0) / scale, lin(1)};
  }
  return out;
}

/// Replicates `base` `multiplier` times. Copy 1 is exact; later copies get
/// independent +-10% factors on p_min and p_max and a {-1,0,+1} shift on the
/// daily start cap and on the minimum runtime in hours.
inline Fleet synthesize_fleet(const Fleet& base, int multiplier, std::uint64_t seed) {
  if (multiplier < 1) throw ArgumentError("multiplier must be >= 1");
  SplitMix rng(seed);
  std::vector<GeneratorSpec> out;
  out.reserve(base.size() * static_cast<std::size_t>(multiplier));
  for (int copy = 1; copy <= multiplier; ++copy) {
    for (const auto& g : base.generators) {
      GeneratorSpec s = g;
      if (copy > 1) {
        s.id = g.id + "#" + std::to_string(copy);
        const double f_min = rng.uniform(0.9, 1.1);
        const double f_max = rng.uniform(0.9, 1.1);
        const int d_starts = rng.shift();
        const int d_hours = rng.shift();
        s.p_max = g.p_max * f_max;
        s.p_min = std::min(g.p_min * f_min, s.p_max);
        // Rates keep their %/min of capacity.
        s.ramp_up_rate = g.ramp_up_rate * f_max;
        s.ramp_down_rate = g.ramp_down_rate * f_max;
        s.max_daily_starts = std::max(1, g.max_daily_starts + d_starts);
        s.min_runtime = std::max(0.0, g.min_runtime + 60.0 * d_hours);
      }
      out.push_back(std::move(s));
    }
  }
  return Fleet(std::move(out), base.base_multiplier * multiplier);
}

/// Synthetic stand-in for the 42-unit base system: parameters are drawn from
/// published coal/gas ranges and capacities normalised to 9047.9 MW total.
/// These are reconstructed values, not historical unit data.
inline Fleet reconstructed_base_fleet() {
  constexpr double kTotalCapacity = 9047.9;
  SplitMix rng(0x5eed'42ULL);
  struct Class {
    const char* prefix;
    Fuel fuel;
    int count;
    double cap_lo, cap_hi, pmin_lo, pmin_hi, b_lo, b_hi, c_lo, c_hi, hot_lo, hot_hi;
    int run_lo, run_hi, starts_lo, starts_hi;
  };
  // clang-format off
  const std::array<Class, 3> classes{{
      {"coal",  Fuel::coal,  8, 300, 1300, 0.35, 0.50, 18, 30, 1, 5, 30, 60, 4, 24, 1, 3},
      {"ccgt",  Fuel::gas,  10, 150,  700, 0.30, 0.50, 25, 40, 2, 8, 20, 40, 1,  8, 1, 6},
      {"small", Fuel::gas,  24,  10,  150, 0.20, 0.50, 35, 70, 2, 8,  5, 20, 0,  2, 2, 24},
  }};
  // clang-format on
  std::vector<GeneratorSpec> gens;
  for (const auto& cls : classes) {
    for (int k = 1; k <= cls.count; ++k) {
      GeneratorSpec g;
      g.id = std::string(cls.prefix) + "_" + (k < 10 ? "0" : "") + std::to_string(k);
      g.fuel = cls.fuel;
      const bool coal = cls.fuel == Fuel::coal;
      g.p_max = rng.uniform(cls.cap_lo, cls.cap_hi);
      g.p_min = g.p_max * rng.uniform(cls.pmin_lo, cls.pmin_hi);
      g.cost.a = rng.uniform(1.0, 6.0) / g.p_max;
      g.cost.b = rng.uniform(cls.b_lo, cls.b_hi);
      g.cost.c = g.p_max * rng.uniform(cls.c_lo, cls.c_hi);
      const double hot = g.p_max * rng.uniform(cls.hot_lo, cls.hot_hi);
      const double warm = hot * (coal ? rng.uniform(1.19, 1.42) : rng.uniform(1.12, 1.58));
      const double cold = hot * (coal ? rng.uniform(1.74, 1.93) : rng.uniform(1.35, 2.25));
      g.start_costs = {hot, warm, std::max(warm, cold)};
      g.shutdown_cost = 0.5 * hot;
      const double d_hot = coal ? rng.uniform(60, 240) : rng.uniform(25, 120);
      const double d_warm = coal ? rng.uniform(120, 480) : rng.uniform(60, 240);
      const double d_cold = coal ? rng.uniform(360, 720) : rng.uniform(120, 300);
      g.start_durations = {d_hot, std::max(d_hot, d_warm), std::max({d_hot, d_warm, d_cold})};
      g.min_runtime = 60.0 * rng.integer(cls.run_lo, cls.run_hi);
      g.max_daily_starts = rng.integer(cls.starts_lo, cls.starts_hi);
      const double up_pct = coal ? rng.uniform(1.0, 6.0) : rng.uniform(2.0, 12.0);
      g.ramp_up_rate = up_pct / 100.0 * g.p_max;
      g.ramp_down_rate = (coal ? 5.0 : 15.0) / 100.0 * g.p_max;
      gens.push_back(std::move(g));
    }
  }
  double total = 0.0;
  for (const auto& g : gens) total += g.p_max;
  const double f = kTotalCapacity / total;
  for (auto& g : gens) {
    g.p_max *= f;
    g.p_min *= f;
    g.cost.a /= f;
    g.cost.c *= f;
    g.ramp_up_rate *= f;
    g.ramp_down_rate *= f;
    g.start_costs = {g.start_costs.hot * f, g.start_costs.warm * f, g.start_costs.cold * f};
    g.shutdown_cost *= f;
  }
  return Fleet(std::move(gens), 1);
}

// ---------------------------------------------------------------------------
// Fleet file: JSON array of generator records, snake_case GeneratorSpec fields.

inline nlohmann::json to_json(const GeneratorSpec& g) {
  auto triple = [](const StartTriple& t) {
    return nlohmann::json{{"hot", t.hot}, {"warm", t.warm}, {"cold", t.cold}};
  };
  return nlohmann::json{
      {"id", g.id},
      {"cost", {{"a", g.cost.a}, {"b", g.cost.b}, {"c", g.cost.c}}},
      {"p_min", g.p_min},
      {"p_max", g.p_max},
      {"fuel", to_string(g.fuel)},
      {"ramp_up_rate", g.ramp_up_rate},
      {"ramp_down_rate", g.ramp_down_rate},
      {"min_runtime", g.min_runtime},
      {"max_daily_starts", g.max_daily_starts},
      {"start_durations", triple(g.start_durations)},
      {"start_costs", triple(g.start_costs)},
      {"shutdown_cost", g.shutdown_cost},
      {"p_typ", g.p_typ()},
  };
}

namespace detail {

inline void require_fields(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                           std::initializer_list<const char*> required, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return item.key() == k; }) == allowed.end())
      throw FormatError(where + ": unknown field '" + item.key() + "'");
  }
  for (const char* k : required)
    if (!obj.contains(k)) throw FormatError(where + ": missing field '" + std::string(k) + "'");
}

inline StartTriple triple_from_json(const nlohmann::json& j, const std::string& where) {
  require_fields(j, {"hot", "warm", "cold"}, {"hot", "warm", "cold"}, where);
  return {j.at("hot").get<double>(), j.at("warm").get<double>(), j.at("cold").get<double>()};
}

}  // namespace detail

inline GeneratorSpec generator_from_json(const nlohmann::json& j) {
  const std::string where = j.is_object() && j.contains("id") && j["id"].is_string()
                                ? "generator '" + j["id"].get<std::string>() + "'"
                                : std::string("generator record");
  detail::require_fields(
      j,
      {"id", "cost", "p_min", "p_max", "fuel", "ramp_up_rate", "ramp_down_rate", "min_runtime",
       "max_daily_starts", "start_durations", "start_costs", "shutdown_cost", "p_typ"},
      {"id", "cost", "p_min", "p_max", "fuel", "ramp_up_rate", "ramp_down_rate", "min_runtime",
       "max_daily_starts", "start_durations", "start_costs", "shutdown_cost"},
      where);
  try {
    GeneratorSpec g;
    g.id = j.at("id").get<std::string>();
    const auto& cost = j.at("cost");
    detail::require_fields(cost, {"a", "b", "c"}, {"a", "b", "c"}, where + " cost");
    g.cost = {cost.at("a").get<double>(), cost.at("b").get<double>(), cost.at("c").get<double>()};
    g.p_min = j.at("p_min").get<double>();
    g.p_max = j.at("p_max").get<double>();
    const auto fuel = j.at("fuel").get<std::string>();
    if (fuel != "coal" && fuel != "gas") throw FormatError(where + ": fuel must be coal or gas");
    g.fuel = fuel == "coal" ? Fuel::coal : Fuel::gas;
    g.ramp_up_rate = j.at("ramp_up_rate").get<double>();
    g.ramp_down_rate = j.at("ramp_down_rate").get<double>();
    g.min_runtime = j.at("min_runtime").get<double>();
    g.max_daily_starts = j.at("max_daily_starts").get<int>();
    g.start_durations = detail::triple_from_json(j.at("start_durations"), where + " start_durations");
    g.start_costs = detail::triple_from_json(j.at("start_costs"), where + " start_costs");
    g.shutdown_cost = j.at("shutdown_cost").get<double>();
    if (j.contains("p_typ") &&
        std::abs(j["p_typ"].get<double>() - g.p_typ()) > 1e-9 * std::max(1.0, g.p_typ()))
      throw FormatError(where + ": p_typ disagrees with (4 p_max + p_min)/5");
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

inline nlohmann::json fleet_to_json(const Fleet& fleet) {
  auto arr = nlohmann::json::array();
  for (const auto& g : fleet.generators) arr.push_back(to_json(g));
  return arr;
}

inline Fleet fleet_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("fleet file must be a JSON array of generator records");
  std::vector<GeneratorSpec> gens;
  for (const auto& rec : j) gens.push_back(generator_from_json(rec));
  try {
    return Fleet(std::move(gens));
  } catch (const ArgumentError& e) {
    throw FormatError(e.what());
  }
}

inline Fleet load_fleet(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open fleet file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("fleet file '" + path + "': " + e.what());
  }
  return fleet_from_json(j);
}

inline void save_fleet(const Fleet& fleet, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write fleet file '" + path + "'");
  out << fleet_to_json(fleet).dump(2) << '\n';
}

}  // namespace rruc
