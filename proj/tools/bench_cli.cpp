// SPDX-License-Identifier: Apache-2.0
// Experiment harness CLI: runs sweep plans over scenario files, writes CSV
// summaries and plot scripts, and optionally enforces trend checks.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "triscc/experiment.hpp"

using namespace triscc;

namespace {

struct TrendCheck {
  std::string metric;
  std::string mode;
  bool nondecreasing;
};

TrendCheck parse_check(const std::string& spec) {
  // metric:mode:direction, e.g. tec:PROPOSED:nondecreasing
  TrendCheck c;
  auto p1 = spec.find(':');
  auto p2 = spec.rfind(':');
  if (p1 == std::string::npos || p2 == p1)
    throw CLI::ValidationError("--check expects metric:mode:direction");
  c.metric = spec.substr(0, p1);
  c.mode = spec.substr(p1 + 1, p2 - p1 - 1);
  const std::string dir = spec.substr(p2 + 1);
  if (dir == "nondecreasing") c.nondecreasing = true;
  else if (dir == "nonincreasing") c.nondecreasing = false;
  else throw CLI::ValidationError("direction must be nondecreasing|nonincreasing");
  return c;
}

double DrawOutcome::*metric_field(const std::string& name) {
  if (name == "tec") return &DrawOutcome::tec;
  if (name == "echo_sinr") return &DrawOutcome::mean_echo_sinr;
  if (name == "sum_rate_I") return &DrawOutcome::sum_rate_I;
  if (name == "sum_rate_II") return &DrawOutcome::sum_rate_II;
  if (name == "execute_data") return &DrawOutcome::execute_data_bits;
  throw CLI::ValidationError("unknown metric '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative transmissive-RIS ISCC network bench harness"};

  std::string scenario_path;
  std::string sweep_name = "none";
  std::vector<double> values;
  std::vector<std::string> mode_names = {"PROPOSED"};
  int draws = 1;
  std::uint64_t seed = 1;
  std::string out_dir = "bench-out";
  std::vector<std::string> checks;
  std::string dump_channels_path;
  bool quiet = false;

  app.add_option("--scenario", scenario_path, "Scenario config file (key = value lines)");
  app.add_option("--sweep", sweep_name, "Sweep variable: none|N_t|P_t|T|D_target|P_md|sinr_target");
  app.add_option("--values", values, "Sweep values");
  app.add_option("--modes", mode_names, "Modes: PROPOSED ILC MRC TCT NC IR");
  app.add_option("--draws", draws, "Monte-Carlo draws per point")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Base RNG seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--check", checks,
                 "Trend check metric:mode:direction over the sweep (exit 1 on violation)");
  app.add_option("--dump-channels", dump_channels_path,
                 "Write the draw-0 channel set to this file and exit");
  app.add_flag("--quiet", quiet, "Suppress per-point progress output");
  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentPlan plan;
    plan.scenario = scenario_path.empty() ? ScenarioConfig{} : load_scenario_file(scenario_path);
    plan.scenario.rng_seed = seed;
    plan.sweep = sweep_var_from_string(sweep_name);
    plan.values = values;
    plan.modes.clear();
    for (const auto& m : mode_names) plan.modes.push_back(baseline_mode_from_string(m));
    plan.draws = draws;
    plan.seed = seed;
    plan.out_dir = out_dir;

    if (!dump_channels_path.empty()) {
      const Geometry geom = derive_geometry(plan.scenario);
      const ChannelSet ch = draw_channels(geom, plan.scenario, 0);
      std::ofstream os(dump_channels_path);
      dump_channels(ch, os);
      std::cout << "wrote " << dump_channels_path << "\n";
      return 0;
    }

    ExperimentResult result = run_experiment(plan);
    for (const auto& f : emit_outputs(result, out_dir))
      if (!quiet) std::cout << "wrote " << f << "\n";

    if (!quiet) {
      for (const auto& p : result.points) {
        std::cout << to_string(p.sweep) << '=' << p.value << " mode=" << to_string(p.mode)
                  << " ok=" << p.ok_count() << '/' << p.draws.size()
                  << " tec=" << p.mean(&DrawOutcome::tec)
                  << " sinr=" << p.mean(&DrawOutcome::mean_echo_sinr) << "\n";
      }
    }

    bool all_ok = true;
    for (const auto& spec : checks) {
      const TrendCheck c = parse_check(spec);
      std::string detail;
      const bool ok = check_trend(result, baseline_mode_from_string(c.mode),
                                  metric_field(c.metric), c.nondecreasing, 0.0, &detail);
      std::cout << (ok ? "[PASS] " : "[FAIL] ") << spec << "  " << detail << "\n";
      all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
