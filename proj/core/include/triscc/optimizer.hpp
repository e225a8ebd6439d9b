// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "triscc/conic/problem.hpp"
#include "triscc/model.hpp"

namespace triscc {

struct BcdOptions {
  int max_outer = 30;
  int irm_max_inner = 15;
  double irm_c0 = 2.0;
  double irm_growth = 1.5;
  double irm_tol = 1e-6;          ///< relative (G+1)-th eigenvalue target
  double rho_round_threshold = 0.5;
  conic::SolveOptions solver{1e-8, 1e-8, 1e-8, 100, false, 0.0, 1e-8};
};

struct BcdState {
  BeamformerSet bf;
  Schedule sched;
  Allocation alloc;
  VecR demand_bits;  ///< per-device execute-data demand (sensing task)
  VecR rate2;        ///< slot-II rates frozen for Block III, bit/s/Hz
  double energy = 0.0;
};

struct IterationRecord {
  int iteration = 0;
  double objective_j = 0.0;
  double block_seconds[3] = {0, 0, 0};
  std::string block_status[3];
  int solve_count = 0;
};

struct BcdResult {
  BcdState state;
  EnergyReport energy;
  std::vector<double> trace;  ///< objective per outer iteration, [0] = init
  std::vector<IterationRecord> records;
  bool converged = false;
  int iterations = 0;
  double mean_echo_sinr = 0.0;
  double sum_rate_I = 0.0;
  double sum_rate_II = 0.0;
  double execute_data_bits = 0.0;
  FeasibilityReport final_feasibility;
};

/// Strictly feasible start: rank-G singular-vector communication beams scaled
/// to the rate threshold, capacity-aware sensing illumination, mask-fit
/// slot-II sensing covariances, all-ones schedule, equal time thirds with the
/// data split projected onto the CPU caps. Throws InfeasibleError when no
/// feasible start exists under the configuration.
BcdState init_feasible(const ScenarioConfig& cfg, const ChannelSet& ch,
                       const RegistrationSpec& reg);

/// Linear-programming schedule update (relaxation + threshold rounding with
/// row/column repair). Keeps the previous schedule when the update would
/// break data coverage, the acquisition floor, or the SINR floor.
/// Returns solver status for the trace.
std::string block1_schedule(const ScenarioConfig& cfg, const ChannelSet& ch,
                            BcdState& state, const BcdOptions& opts);

/// Slot-separated SDP beamforming update with SCA rate bounds and rank
/// control (pinned rank-G subspace at the Proposition-1 endpoint, iterative
/// rank minimization loop from higher-rank starts). Returns candidate
/// beamformers; `status` carries per-slot solver outcomes.
BeamformerSet block2_beamforming(const ScenarioConfig& cfg, const ChannelSet& ch,
                                 const RegistrationSpec& reg, const BcdState& state,
                                 const BcdOptions& opts, std::string& status,
                                 int* solve_count = nullptr);

/// Convex time/data update (power-cone energy epigraphs, SCA of the shared
/// remote-CPU constraint). Returns the new allocation or nullopt on solver
/// failure (caller keeps the incumbent).
std::optional<Allocation> block3_allocation(const ScenarioConfig& cfg,
                                            const BcdState& state,
                                            const BcdOptions& opts,
                                            std::string& status);

/// Full BCD driver (Algorithm-style loop, objective-safeguarded).
BcdResult run_bcd(const ScenarioConfig& cfg, const ChannelSet& ch,
                  const RegistrationSpec& reg, const BcdOptions& opts = {});

/// Baseline dispatch on cfg.baseline_mode: ILC pins d_r = 0, MRC pins
/// d_l = 0, TCT replaces the per-element cap by the trace cap with a
/// concentrated-beam init, NC runs per-device solves without scheduling,
/// IR is the matching-degree degradation path.
BcdResult run_baseline(const ScenarioConfig& cfg, const ChannelSet& ch,
                       const RegistrationSpec& reg, const BcdOptions& opts = {});

}  // namespace triscc
