// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "triscc/optimizer.hpp"

namespace triscc {

enum class SweepVar { kNone, kNt, kPt, kT, kDTarget, kPmd, kSinrTarget };

std::string to_string(SweepVar v);
SweepVar sweep_var_from_string(const std::string& name);

struct ExperimentPlan {
  ScenarioConfig scenario;
  SweepVar sweep = SweepVar::kNone;
  std::vector<double> values;  ///< one point when sweep == kNone
  std::vector<BaselineMode> modes = {BaselineMode::kProposed};
  int draws = 1;
  std::uint64_t seed = 1;
  std::string out_dir;
  BcdOptions bcd;
};

struct DrawOutcome {
  int draw = 0;
  bool ok = false;
  std::string error;
  double tec = 0.0, mean_echo_sinr = 0.0, sum_rate_I = 0.0, sum_rate_II = 0.0;
  double execute_data_bits = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_residual = 0.0;
  double dl_total = 0.0, dr_total = 0.0;
  std::vector<double> trace;
  std::vector<IterationRecord> records;
};

struct PointResult {
  SweepVar sweep = SweepVar::kNone;
  double value = 0.0;
  BaselineMode mode = BaselineMode::kProposed;
  std::vector<DrawOutcome> draws;

  int ok_count() const;
  double mean(double DrawOutcome::*field) const;
  double ci95(double DrawOutcome::*field) const;
};

struct ExperimentResult {
  ExperimentPlan plan;
  std::vector<PointResult> points;
  std::uint64_t config_hash = 0;
};

/// Apply one sweep assignment to a scenario (N_t expects a perfect square).
ScenarioConfig apply_sweep(const ScenarioConfig& base, SweepVar var, double value);

/// Run all sweep points x modes x draws (draws in parallel); failures are
/// recorded per draw and the run continues.
ExperimentResult run_experiment(const ExperimentPlan& plan);

/// Write summary.csv, raw.csv, runs.jsonl and a plot script into `dir`.
/// Returns the file paths written.
std::vector<std::string> emit_outputs(const ExperimentResult& result, const std::string& dir);

/// Direction check over the per-point means of one mode; `nondecreasing`
/// selects the expected direction, `slack_rel` tolerates noise.
bool check_trend(const ExperimentResult& result, BaselineMode mode,
                 double DrawOutcome::*metric, bool nondecreasing,
                 double slack_rel, std::string* detail = nullptr);

std::uint64_t config_hash(const ScenarioConfig& cfg);

}  // namespace triscc
