// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "triscc/channels.hpp"
#include "triscc/registration.hpp"
#include "triscc/scenario.hpp"
#include "triscc/types.hpp"

namespace triscc {

/// Per-slot Hermitian transmit covariances  W̄ = W W^H  of the communication
/// and sensing stream beamformers.
struct BeamformerSet {
  std::vector<MatC> Wc[2];  // [slot][device], N_t x N_t
  std::vector<MatC> Ws[2];

  static BeamformerSet zeros(int K, int N_t);
  MatC total(Slot s, int k) const { return Wc[s][k] + Ws[s][k]; }
  int device_count() const { return static_cast<int>(Wc[0].size()); }
};

/// Sensing-beam scheduling: binary rho, its relaxation, and the auxiliary
/// echo-SINR bounds p.
struct Schedule {
  MatR rho;          // K x M, entries in {0,1}
  MatR rho_relaxed;  // K x M, entries in [0,1]
  MatR p;            // K x M, >= 0

  static Schedule all_ones(int K, int M);
};

/// Slot durations and data split per device.
struct Allocation {
  VecR t1, t2, t3;  // s
  VecR dl, dr;      // bits

  static Allocation zeros(int K);
};

struct EnergyReport {
  VecR Et1, Et2, El, Er;  // J per device
  double total = 0.0;
};

/// Achievable rate (bit/s/Hz) of device k in the given slot, computed as
/// log2 det(sigma^2 I + sum_i H_i W̄_i H_i^H) - log2 det(R_k) with R_k the
/// interference covariance (other devices' streams plus all sensing streams).
double rate_slot(const ScenarioConfig& cfg, const ChannelSet& ch,
                 const BeamformerSet& bf, Slot slot, int k);

/// Echo SINR of device k about target m under the slot-I covariances.
/// matching_degree < 1 scales the useful echo and moves the rest to clutter.
double echo_sinr(const ScenarioConfig& cfg, const ChannelSet& ch,
                 const BeamformerSet& bf, const Schedule& sched, int k, int m);

/// Acquired sensing data (bits): f_s q_b SINR t1.
double sensing_data(const ScenarioConfig& cfg, double sinr, double t1);

/// Local computation energy alpha_l (c_l d_l)^3 / (T - t1)^2.
double energy_local(const ScenarioConfig& cfg, double dl_bits, double t1);

/// Remote computation energy alpha_r (c_r d_r)^3 / t3^2 (0 when d_r = 0).
double energy_remote(const ScenarioConfig& cfg, double dr_bits, double t3);

EnergyReport total_energy(const ScenarioConfig& cfg, const BeamformerSet& bf,
                          const Allocation& alloc);

struct Residual {
  std::string name;
  double value;  ///< signed; feasible when <= tolerance
};

/// Signed residual for every problem constraint, normalized by the natural
/// scale of each quantity (power by P_t, rates by R_th, data by the demand,
/// times by T). Feasible iff max residual <= tol.
struct FeasibilityReport {
  std::vector<Residual> residuals;
  double max_residual = 0.0;
  bool feasible(double tol = 1e-6) const { return max_residual <= tol; }
  std::string to_csv() const;
};

FeasibilityReport check_feasibility(const ScenarioConfig& cfg, const ChannelSet& ch,
                                    const BeamformerSet& bf, const Schedule& sched,
                                    const Allocation& alloc, const RegistrationSpec& reg,
                                    const VecR& demand_bits);

}  // namespace triscc
