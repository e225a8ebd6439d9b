// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "triscc/types.hpp"

namespace triscc {

enum class BaselineMode { kProposed, kIlc, kMrc, kTct, kNc, kIr };

std::string to_string(BaselineMode mode);
BaselineMode baseline_mode_from_string(const std::string& name);

using Vec3 = std::array<double, 3>;

/// Full experiment description: geometry, array sizes, RF and compute
/// constants, baseline mode. Loaded from a flat key=value file; every key
/// carries its unit in the name. Defaults follow the reference parameter
/// table where given, otherwise the documented values below.
struct ScenarioConfig {
  int K = 3;  ///< ISCC device count
  int M = 5;  ///< target count
  int N = 8;  ///< AP antenna count (ULA)
  int N_r = 4;
  int N_c = 4;
  int G = 2;  ///< communication stream count, G <= min(N_t, N)

  double f_carrier_hz = 30e9;
  double bandwidth_hz = 20e6;
  double noise_power_w = 1e-12;  // -90 dBm, one value for all receivers
  double element_power_max_w = 1.0;
  double frame_duration_s = 1.0;
  double rate_threshold_bpshz = 1.0;
  double registration_error_max = 0.0;  ///< gamma_th; <=0 means auto-calibrated

  double sampling_frequency_hz = 20e6;
  int quantization_bits = 8;
  int cycles_per_bit_local = 1000;
  int cycles_per_bit_remote = 1000;
  double cpu_freq_max_local_hz = 3e9;
  double cpu_freq_max_remote_hz = 5e9;
  double capacitance_local = 0.3e-27;   // A^2 s^4 / F
  double capacitance_remote = 1.0e-27;  // A^2 s^4 / F

  double rician_factor = 3.0;  // linear
  double target_rcs_m2 = 1.0;
  double matching_degree = 1.0;  ///< P_md in (0,1]; <1 degrades the echo
  double bcd_epsilon = 1e-3;
  std::uint64_t rng_seed = 1;
  BaselineMode baseline_mode = BaselineMode::kProposed;

  Vec3 position_ap = {0.0, -50.0, 10.0};
  std::vector<Vec3> positions_dev = {
      {-50.0, 0.0, 10.0}, {0.0, 0.0, 10.0}, {50.0, 0.0, 10.0}};
  std::vector<Vec3> positions_tgt = {{-75.0, 50.0, 0.0},
                                     {-25.0, 50.0, 0.0},
                                     {0.0, 50.0, 0.0},
                                     {25.0, 50.0, 0.0},
                                     {75.0, 50.0, 0.0}};

  // Registration grid used by the optimizer (module-level API defaults to
  // L=64, pi/L spacing; the desk scenario needs finer pitch resolution).
  int reg_grid_size = 12;
  double reg_grid_pitch_spacing_rad = 0.035;
  double reg_grid_azimuth_spacing_rad = 0.20;
  double reg_beamwidth_ref_rad = 0.0;  ///< reference azimuth width; <=0 -> 0.886*2/N_c

  // Sensing-task demand. The executed data per device must reach
  // demand_fraction x (initial acquisition), or the absolute target when set.
  double demand_fraction = 0.8;
  double execute_data_target_bits = 0.0;  ///< D_target; <=0 disables
  double echo_sinr_floor = 0.0;           ///< per scheduled pair; <=0 disables
  double init_sensing_fraction = 0.02;    ///< slot-I illumination, fraction of P_t

  int N_t() const { return N_r * N_c; }
  double wavelength_m() const { return kSpeedOfLight / f_carrier_hz; }
};

/// Distances and angles between AP, devices, and targets. Pitch is measured
/// from the array normal (pointing down, -z); azimuth from the +x axis.
struct Geometry {
  VecR d_dev_ap;      // K
  VecR pitch_dev_ap;  // K, from -z
  VecR azim_dev_ap;   // K
  VecR ap_cosine;     // K, direction cosine along the AP ULA axis (+x)
  MatR d_dev_tgt;     // K x M
  MatR pitch_dev_tgt; // K x M
  MatR azim_dev_tgt;  // K x M
  VecR height_dev;    // K
};

/// Parse a flat key=value scenario file. Unknown keys are rejected, missing
/// keys take the documented defaults.
ScenarioConfig load_scenario(std::istream& source);
ScenarioConfig load_scenario_file(const std::string& path);

/// Validate invariants (counts, positivity, G bound). Throws ConfigError.
void validate(const ScenarioConfig& cfg);

/// Euclidean distances and angles; deterministic; throws
/// DegenerateGeometryError on coincident positions.
Geometry derive_geometry(const ScenarioConfig& cfg);

}  // namespace triscc
