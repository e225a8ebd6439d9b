// SPDX-License-Identifier: Apache-2.0
#include "triscc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace triscc {

std::string to_string(BaselineMode mode) {
  switch (mode) {
    case BaselineMode::kProposed: return "PROPOSED";
    case BaselineMode::kIlc: return "ILC";
    case BaselineMode::kMrc: return "MRC";
    case BaselineMode::kTct: return "TCT";
    case BaselineMode::kNc: return "NC";
    case BaselineMode::kIr: return "IR";
  }
  return "PROPOSED";
}

BaselineMode baseline_mode_from_string(const std::string& name) {
  if (name == "PROPOSED") return BaselineMode::kProposed;
  if (name == "ILC") return BaselineMode::kIlc;
  if (name == "MRC") return BaselineMode::kMrc;
  if (name == "TCT") return BaselineMode::kTct;
  if (name == "NC") return BaselineMode::kNc;
  if (name == "IR") return BaselineMode::kIr;
  throw ConfigError("baseline_mode", "unknown mode '" + name + "'");
}

namespace {

Vec3 parse_vec3(const std::string& key, const std::string& value) {
  std::istringstream ss(value);
  Vec3 v{};
  if (!(ss >> v[0] >> v[1] >> v[2])) {
    throw ConfigError(key, "expected three numbers, got '" + value + "'");
  }
  return v;
}

double parse_num(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  double v = parse_num(key, value);
  if (v != std::floor(v)) throw ConfigError(key, "expected an integer");
  return static_cast<int>(v);
}

}  // namespace

ScenarioConfig load_scenario(std::istream& source) {
  ScenarioConfig cfg;
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(source, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      // blank or comment-only line
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw ConfigError("line " + std::to_string(lineno),
                          "expected 'key = value', got '" + line + "'");
      }
      continue;
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    if (kv.count(key)) throw ConfigError(key, "duplicate key");
    kv[key] = value;
  }

  auto take = [&](const std::string& key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) return {};
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto num = [&](const std::string& key, double& dst) {
    if (auto v = take(key); !v.empty()) dst = parse_num(key, v);
  };
  auto integer = [&](const std::string& key, int& dst) {
    if (auto v = take(key); !v.empty()) dst = parse_int(key, v);
  };

  integer("device_count", cfg.K);
  integer("target_count", cfg.M);
  integer("ap_antenna_count", cfg.N);
  integer("tris_rows", cfg.N_r);
  integer("tris_cols", cfg.N_c);
  integer("stream_count", cfg.G);
  num("carrier_frequency_hz", cfg.f_carrier_hz);
  num("bandwidth_hz", cfg.bandwidth_hz);
  num("noise_power_w", cfg.noise_power_w);
  num("element_power_max_w", cfg.element_power_max_w);
  num("frame_duration_s", cfg.frame_duration_s);
  num("rate_threshold_bpshz", cfg.rate_threshold_bpshz);
  num("registration_error_max", cfg.registration_error_max);
  num("sampling_frequency_hz", cfg.sampling_frequency_hz);
  integer("quantization_bits", cfg.quantization_bits);
  integer("cycles_per_bit_local", cfg.cycles_per_bit_local);
  integer("cycles_per_bit_remote", cfg.cycles_per_bit_remote);
  num("cpu_freq_max_local_hz", cfg.cpu_freq_max_local_hz);
  num("cpu_freq_max_remote_hz", cfg.cpu_freq_max_remote_hz);
  num("capacitance_local_a2s4pf", cfg.capacitance_local);
  num("capacitance_remote_a2s4pf", cfg.capacitance_remote);
  num("rician_factor", cfg.rician_factor);
  num("target_rcs_m2", cfg.target_rcs_m2);
  num("matching_degree", cfg.matching_degree);
  num("bcd_epsilon", cfg.bcd_epsilon);
  if (auto v = take("rng_seed"); !v.empty()) {
    cfg.rng_seed = static_cast<std::uint64_t>(parse_num("rng_seed", v));
  }
  if (auto v = take("baseline_mode"); !v.empty()) {
    cfg.baseline_mode = baseline_mode_from_string(v);
  }
  integer("reg_grid_size", cfg.reg_grid_size);
  num("reg_grid_pitch_spacing_rad", cfg.reg_grid_pitch_spacing_rad);
  num("reg_grid_azimuth_spacing_rad", cfg.reg_grid_azimuth_spacing_rad);
  num("reg_beamwidth_ref_rad", cfg.reg_beamwidth_ref_rad);
  num("demand_fraction", cfg.demand_fraction);
  num("execute_data_target_bits", cfg.execute_data_target_bits);
  num("echo_sinr_floor", cfg.echo_sinr_floor);
  num("init_sensing_fraction", cfg.init_sensing_fraction);

  if (auto v = take("ap_position_m"); !v.empty()) cfg.position_ap = parse_vec3("ap_position_m", v);
  bool any_dev_pos = false, any_tgt_pos = false;
  for (const auto& [k, v] : kv) {
    if (k.rfind("device_position_m_", 0) == 0) any_dev_pos = true;
    if (k.rfind("target_position_m_", 0) == 0) any_tgt_pos = true;
  }
  const ScenarioConfig defaults{};
  if (any_dev_pos || cfg.K != static_cast<int>(defaults.positions_dev.size())) {
    cfg.positions_dev.assign(cfg.K, Vec3{0, 0, 0});
    for (int k = 0; k < cfg.K; ++k) {
      std::string key = "device_position_m_" + std::to_string(k);
      auto v = take(key);
      if (v.empty()) throw ConfigError(key, "missing device position");
      cfg.positions_dev[k] = parse_vec3(key, v);
    }
  }
  if (any_tgt_pos || cfg.M != static_cast<int>(defaults.positions_tgt.size())) {
    cfg.positions_tgt.assign(cfg.M, Vec3{0, 0, 0});
    for (int m = 0; m < cfg.M; ++m) {
      std::string key = "target_position_m_" + std::to_string(m);
      auto v = take(key);
      if (v.empty()) throw ConfigError(key, "missing target position");
      cfg.positions_tgt[m] = parse_vec3(key, v);
    }
  }

  if (!kv.empty()) {
    throw ConfigError(kv.begin()->first, "unknown key");
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, "cannot open scenario file");
  return load_scenario(f);
}

void validate(const ScenarioConfig& cfg) {
  auto require = [](bool ok, const std::string& key, const std::string& why) {
    if (!ok) throw ConfigError(key, why);
  };
  require(cfg.K >= 1, "device_count", "must be >= 1");
  require(cfg.M >= 1, "target_count", "must be >= 1");
  require(cfg.N >= 1, "ap_antenna_count", "must be >= 1");
  require(cfg.N_r >= 1 && cfg.N_c >= 1, "tris_rows/tris_cols", "must be >= 1");
  require(cfg.G >= 1 && cfg.G <= std::min(cfg.N_t(), cfg.N), "stream_count",
          "requires 1 <= G <= min(N_t, N)");
  require(cfg.f_carrier_hz > 0, "carrier_frequency_hz", "must be > 0");
  require(cfg.bandwidth_hz > 0, "bandwidth_hz", "must be > 0");
  require(cfg.noise_power_w > 0, "noise_power_w", "must be > 0");
  require(cfg.element_power_max_w > 0, "element_power_max_w", "must be > 0");
  require(cfg.frame_duration_s > 0, "frame_duration_s", "must be > 0");
  require(cfg.sampling_frequency_hz > 0, "sampling_frequency_hz", "must be > 0");
  require(cfg.quantization_bits >= 1, "quantization_bits", "must be a positive integer");
  require(cfg.cycles_per_bit_local >= 1, "cycles_per_bit_local", "must be a positive integer");
  require(cfg.cycles_per_bit_remote >= 1, "cycles_per_bit_remote", "must be a positive integer");
  require(cfg.cpu_freq_max_local_hz > 0, "cpu_freq_max_local_hz", "must be > 0");
  require(cfg.cpu_freq_max_remote_hz > 0, "cpu_freq_max_remote_hz", "must be > 0");
  require(cfg.capacitance_local > 0 && cfg.capacitance_remote > 0,
          "capacitance_*", "must be > 0");
  require(cfg.rician_factor >= 0, "rician_factor", "must be >= 0");
  require(cfg.target_rcs_m2 > 0, "target_rcs_m2", "must be > 0");
  require(cfg.matching_degree > 0 && cfg.matching_degree <= 1.0, "matching_degree",
          "must be in (0, 1]");
  require(cfg.bcd_epsilon > 0, "bcd_epsilon", "must be > 0");
  require(static_cast<int>(cfg.positions_dev.size()) == cfg.K, "device_position_m_*",
          "need one position per device");
  require(static_cast<int>(cfg.positions_tgt.size()) == cfg.M, "target_position_m_*",
          "need one position per target");
  require(cfg.reg_grid_size >= 2, "reg_grid_size", "must be >= 2");
  require(cfg.demand_fraction >= 0 && cfg.demand_fraction <= 1.0, "demand_fraction",
          "must be in [0, 1]");
}

namespace {

struct Spherical {
  double dist, pitch, azim;
};

// Pitch from -z (array normal points at the ground); azimuth from +x.
Spherical to_spherical(const Vec3& from, const Vec3& to) {
  double dx = to[0] - from[0], dy = to[1] - from[1], dz = to[2] - from[2];
  double d = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (d <= 0.0) throw DegenerateGeometryError("coincident positions");
  double pitch = std::acos(std::clamp(-dz / d, -1.0, 1.0));
  double azim = std::atan2(dy, dx);
  return {d, pitch, azim};
}

}  // namespace

Geometry derive_geometry(const ScenarioConfig& cfg) {
  Geometry g;
  const int K = cfg.K, M = cfg.M;
  g.d_dev_ap.resize(K);
  g.pitch_dev_ap.resize(K);
  g.azim_dev_ap.resize(K);
  g.ap_cosine.resize(K);
  g.d_dev_tgt.resize(K, M);
  g.pitch_dev_tgt.resize(K, M);
  g.azim_dev_tgt.resize(K, M);
  g.height_dev.resize(K);
  for (int k = 0; k < K; ++k) {
    auto s = to_spherical(cfg.positions_dev[k], cfg.position_ap);
    g.d_dev_ap(k) = s.dist;
    g.pitch_dev_ap(k) = s.pitch;
    g.azim_dev_ap(k) = s.azim;
    g.ap_cosine(k) = (cfg.positions_dev[k][0] - cfg.position_ap[0]) / s.dist;
    g.height_dev(k) = cfg.positions_dev[k][2];
    for (int m = 0; m < M; ++m) {
      auto t = to_spherical(cfg.positions_dev[k], cfg.positions_tgt[m]);
      g.d_dev_tgt(k, m) = t.dist;
      g.pitch_dev_tgt(k, m) = t.pitch;
      g.azim_dev_tgt(k, m) = t.azim;
    }
  }
  return g;
}

}  // namespace triscc
