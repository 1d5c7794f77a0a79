// SPDX-License-Identifier: Apache-2.0

#include "risleak/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace risleak {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw std::invalid_argument(origin + ": " + msg);
}

double parse_double(const std::string& key, const std::string& value,
                    const std::string& origin) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(value, &pos);
    while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return x;
  } catch (const std::exception&) {
    fail(origin, "malformed value for key '" + key + "': '" + value + "'");
  }
}

Eigen::Vector3d parse_vec3(const std::string& key, const std::string& value,
                           const std::string& origin) {
  std::istringstream ss(value);
  Eigen::Vector3d v;
  if (!(ss >> v.x() >> v.y() >> v.z()))
    fail(origin, "key '" + key + "' needs three numbers, got '" + value + "'");
  std::string rest;
  if (ss >> rest) fail(origin, "key '" + key + "' has trailing junk: '" + value + "'");
  return v;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void ScenarioConfig::finalize() {
  const std::string o = "config";
  if (wavelength_m <= 0) fail(o, "wavelength_m must be > 0");
  if (element_spacing_m <= 0) element_spacing_m = wavelength_m / 2.0;
  if (ap_spacing_m <= 0) ap_spacing_m = wavelength_m / 2.0;
  if (reference_loss <= 0) {
    const double f = wavelength_m / (4.0 * kPi);
    reference_loss = f * f;
  }
  if (ris_nx < 1 || ris_ny < 1) fail(o, "ris_nx/ris_ny must satisfy Nx*Ny = N >= 1");
  if (ap_antennas < 1) fail(o, "ap_antennas must be >= 1");
  if (tx_power_w <= 0) fail(o, "tx_power_w must be > 0");
  if (noise_power_w <= 0) fail(o, "noise_power_w must be > 0");
  if (rician_k < 0) fail(o, "rician_k must be >= 0");
  if (scatter_paths < 1) fail(o, "scatter_paths must be >= 1");
  if (area_side_x_m <= 0 || area_side_y_m <= 0) fail(o, "area sides must be > 0");
  if (test_points < 2) fail(o, "test_points must be >= 2");
  if (snr_divisor <= 1.0) fail(o, "snr_divisor must be > 1");
  if (exclusion_radius_m <= 0) fail(o, "exclusion_radius_m must be > 0");
  if (trials < 1) fail(o, "trials must be >= 1");
  if (randomization_samples < 1) fail(o, "randomization_samples must be >= 1");
  if (bisection_tol <= 0) fail(o, "bisection_tol must be > 0");
  if (solver_gap_tol <= 0 || solver_feas_tol <= 0) fail(o, "solver tolerances must be > 0");
  if ((ap_position - ris_position).norm() <= 0) fail(o, "ap_position coincides with ris_position");
  if ((ue_position - ris_position).norm() <= 0) fail(o, "ue_position coincides with ris_position");
}

namespace {

// One entry per config key: setter from string plus emitter for dump.
struct KeyHandler {
  std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;  // null: alias key, not dumped
};

const std::map<std::string, KeyHandler>& key_table() {
  using C = ScenarioConfig;
  static const std::map<std::string, KeyHandler> table = [] {
    std::map<std::string, KeyHandler> t;
    auto num = [&t](const std::string& key, double C::* field) {
      t[key] = {[key, field](C& c, const std::string& v, const std::string& o) {
                  c.*field = parse_double(key, v, o);
                },
                [field](const C& c) { return fmt(c.*field); }};
    };
    auto integer = [&t](const std::string& key, int C::* field) {
      t[key] = {[key, field](C& c, const std::string& v, const std::string& o) {
                  const double x = parse_double(key, v, o);
                  if (x != std::floor(x)) fail(o, "key '" + key + "' must be an integer");
                  c.*field = static_cast<int>(x);
                },
                [field](const C& c) { return std::to_string(c.*field); }};
    };
    auto vec = [&t](const std::string& key, Eigen::Vector3d C::* field) {
      t[key] = {[key, field](C& c, const std::string& v, const std::string& o) {
                  c.*field = parse_vec3(key, v, o);
                },
                [field](const C& c) {
                  const Eigen::Vector3d& p = c.*field;
                  return fmt(p.x()) + " " + fmt(p.y()) + " " + fmt(p.z());
                }};
    };
    auto db_alias = [&t](const std::string& key, double C::* field, bool dbm) {
      t[key] = {[key, field, dbm](C& c, const std::string& v, const std::string& o) {
                  const double db = parse_double(key, v, o);
                  c.*field = dbm ? dbm_to_watts(db) : db_to_linear(db);
                },
                nullptr};
    };

    vec("ap_position", &C::ap_position);
    vec("ris_position", &C::ris_position);
    vec("ue_position", &C::ue_position);
    integer("ap_antennas", &C::ap_antennas);
    integer("ris_nx", &C::ris_nx);
    integer("ris_ny", &C::ris_ny);
    num("wavelength_m", &C::wavelength_m);
    num("element_spacing_m", &C::element_spacing_m);
    num("ap_spacing_m", &C::ap_spacing_m);
    num("tx_power_w", &C::tx_power_w);
    db_alias("tx_power_dbm", &C::tx_power_w, /*dbm=*/true);
    num("noise_power_w", &C::noise_power_w);
    db_alias("noise_power_dbm", &C::noise_power_w, /*dbm=*/true);
    num("rician_k", &C::rician_k);
    db_alias("rician_k_db", &C::rician_k, /*dbm=*/false);
    integer("scatter_paths", &C::scatter_paths);
    num("pathloss_exp_ap_ris", &C::pathloss_exp_ap_ris);
    num("pathloss_exp_ris_ue", &C::pathloss_exp_ris_ue);
    num("reference_loss", &C::reference_loss);
    db_alias("reference_loss_db", &C::reference_loss, /*dbm=*/false);
    num("area_side_x_m", &C::area_side_x_m);
    num("area_side_y_m", &C::area_side_y_m);
    integer("test_points", &C::test_points);
    num("exclusion_radius_m", &C::exclusion_radius_m);
    num("snr_divisor", &C::snr_divisor);
    num("gamma_fixed_snr_db", &C::gamma_fixed_snr_db);
    integer("randomization_samples", &C::randomization_samples);
    num("bisection_tol", &C::bisection_tol);
    num("gamma_feas_slack", &C::gamma_feas_slack);
    num("solver_gap_tol", &C::solver_gap_tol);
    num("solver_feas_tol", &C::solver_feas_tol);
    integer("solver_max_iters", &C::solver_max_iters);
    integer("trials", &C::trials);

    t["seed"] = {[](C& c, const std::string& v, const std::string& o) {
                   try {
                     c.seed = std::stoull(v);
                   } catch (const std::exception&) {
                     fail(o, "malformed value for key 'seed': '" + v + "'");
                   }
                 },
                 [](const C& c) { return std::to_string(c.seed); }};
    t["gamma_mode"] = {[](C& c, const std::string& v, const std::string& o) {
                         if (v == "per_trial") c.gamma_mode = GammaMode::PerTrial;
                         else if (v == "fixed") c.gamma_mode = GammaMode::Fixed;
                         else fail(o, "gamma_mode must be per_trial or fixed, got '" + v + "'");
                       },
                       [](const C& c) {
                         return std::string(c.gamma_mode == GammaMode::PerTrial ? "per_trial"
                                                                                : "fixed");
                       }};
    t["pattern_padding"] = {[](C& c, const std::string& v, const std::string& o) {
                              if (v == "pad_to_quarter") c.pattern_padding = PatternPadding::PadToQuarter;
                              else if (v == "exact") c.pattern_padding = PatternPadding::Exact;
                              else fail(o, "pattern_padding must be pad_to_quarter or exact, got '" + v + "'");
                            },
                            [](const C& c) {
                              return std::string(c.pattern_padding == PatternPadding::PadToQuarter
                                                     ? "pad_to_quarter"
                                                     : "exact");
                            }};
    return t;
  }();
  return table;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(origin, "line " + std::to_string(lineno) + " is not key = value: '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = key_table().find(key);
    if (it == key_table().end()) fail(origin, "unknown key '" + key + "'");
    it->second.set(cfg, value, origin);
  }
  cfg.finalize();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config file not found: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must be key=value: '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  auto it = key_table().find(key);
  if (it == key_table().end())
    throw std::invalid_argument("override references unknown key '" + key + "'");
  it->second.set(cfg, value, "override");
  cfg.finalize();
}

std::string dump_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  for (const auto& [key, handler] : key_table()) {
    if (!handler.get) continue;  // db aliases resolve into their base key
    out << key << " = " << handler.get(cfg) << "\n";
  }
  return out.str();
}

TestPointCloud sample_test_points(const ScenarioConfig& cfg, rng::Stream& stream) {
  TestPointCloud cloud;
  const Eigen::Vector3d& ue = cfg.ue_position;
  const double hx = cfg.area_side_x_m / 2.0;
  const double hy = cfg.area_side_y_m / 2.0;
  const int leakage_points = cfg.test_points - 1;
  cloud.positions.reserve(cfg.test_points);

  constexpr int kMaxRejects = 10000;
  for (int i = 0; i < leakage_points; ++i) {
    Eigen::Vector3d p;
    int tries = 0;
    do {
      if (++tries > kMaxRejects)
        throw std::runtime_error(
            "test-point rejection sampling exceeded iteration cap; "
            "area too small relative to exclusion_radius_m");
      p = {ue.x() + stream.uniform(-hx, hx), ue.y() + stream.uniform(-hy, hy), 0.0};
    } while ((p - ue).norm() < cfg.exclusion_radius_m);
    cloud.positions.push_back(p);
  }
  // UE inserted mid-cloud so index bookkeeping is actually exercised.
  cloud.ue_index = cloud.positions.empty() ? 0 : static_cast<int>(cloud.positions.size() / 2);
  cloud.positions.insert(cloud.positions.begin() + cloud.ue_index, ue);
  return cloud;
}

}  // namespace risleak
