// SPDX-License-Identifier: Apache-2.0
#include "triscc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace triscc {

std::string to_string(SweepVar v) {
  switch (v) {
    case SweepVar::kNone: return "none";
    case SweepVar::kNt: return "N_t";
    case SweepVar::kPt: return "P_t";
    case SweepVar::kT: return "T";
    case SweepVar::kDTarget: return "D_target";
    case SweepVar::kPmd: return "P_md";
    case SweepVar::kSinrTarget: return "sinr_target";
  }
  return "none";
}

SweepVar sweep_var_from_string(const std::string& name) {
  if (name == "none") return SweepVar::kNone;
  if (name == "N_t") return SweepVar::kNt;
  if (name == "P_t") return SweepVar::kPt;
  if (name == "T") return SweepVar::kT;
  if (name == "D_target") return SweepVar::kDTarget;
  if (name == "P_md") return SweepVar::kPmd;
  if (name == "sinr_target") return SweepVar::kSinrTarget;
  throw ConfigError("sweep", "unknown sweep variable '" + name + "'");
}

int PointResult::ok_count() const {
  int n = 0;
  for (const auto& d : draws) n += d.ok ? 1 : 0;
  return n;
}

double PointResult::mean(double DrawOutcome::*field) const {
  double s = 0.0;
  int n = 0;
  for (const auto& d : draws)
    if (d.ok) {
      s += d.*field;
      ++n;
    }
  return n ? s / n : 0.0;
}

double PointResult::ci95(double DrawOutcome::*field) const {
  const double mu = mean(field);
  double ss = 0.0;
  int n = 0;
  for (const auto& d : draws)
    if (d.ok) {
      ss += (d.*field - mu) * (d.*field - mu);
      ++n;
    }
  if (n < 2) return 0.0;
  return 1.96 * std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
}

ScenarioConfig apply_sweep(const ScenarioConfig& base, SweepVar var, double value) {
  ScenarioConfig cfg = base;
  switch (var) {
    case SweepVar::kNone:
      break;
    case SweepVar::kNt: {
      const int side = static_cast<int>(std::lround(std::sqrt(value)));
      if (side * side != static_cast<int>(std::lround(value)))
        throw ConfigError("sweep N_t", "expected a perfect square element count");
      cfg.N_r = cfg.N_c = side;
      break;
    }
    case SweepVar::kPt:
      cfg.element_power_max_w = value;
      break;
    case SweepVar::kT:
      cfg.frame_duration_s = value;
      break;
    case SweepVar::kDTarget:
      cfg.execute_data_target_bits = value;
      break;
    case SweepVar::kPmd:
      cfg.matching_degree = value;
      break;
    case SweepVar::kSinrTarget:
      cfg.echo_sinr_floor = value;
      break;
  }
  validate(cfg);
  return cfg;
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << cfg.K << '|' << cfg.M << '|' << cfg.N << '|' << cfg.N_r << '|' << cfg.N_c << '|'
     << cfg.G << '|' << cfg.f_carrier_hz << '|' << cfg.bandwidth_hz << '|'
     << cfg.noise_power_w << '|' << cfg.element_power_max_w << '|' << cfg.frame_duration_s
     << '|' << cfg.rate_threshold_bpshz << '|' << cfg.registration_error_max << '|'
     << cfg.sampling_frequency_hz << '|' << cfg.quantization_bits << '|'
     << cfg.cycles_per_bit_local << '|' << cfg.cycles_per_bit_remote << '|'
     << cfg.cpu_freq_max_local_hz << '|' << cfg.cpu_freq_max_remote_hz << '|'
     << cfg.capacitance_local << '|' << cfg.capacitance_remote << '|' << cfg.rician_factor
     << '|' << cfg.target_rcs_m2 << '|' << cfg.matching_degree << '|' << cfg.bcd_epsilon
     << '|' << cfg.rng_seed << '|' << to_string(cfg.baseline_mode) << '|'
     << cfg.reg_grid_size << '|' << cfg.demand_fraction << '|'
     << cfg.execute_data_target_bits << '|' << cfg.echo_sinr_floor;
  for (const auto& p : cfg.positions_dev) os << '|' << p[0] << ',' << p[1] << ',' << p[2];
  for (const auto& p : cfg.positions_tgt) os << '|' << p[0] << ',' << p[1] << ',' << p[2];
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

DrawOutcome run_one(const ScenarioConfig& cfg, const Geometry& geom,
                    const RegistrationSpec& reg, const BcdOptions& opts, int draw) {
  DrawOutcome out;
  out.draw = draw;
  try {
    ChannelSet ch = draw_channels(geom, cfg, static_cast<std::uint64_t>(draw));
    BcdResult res = run_bcd(cfg, ch, reg, opts);
    out.ok = true;
    out.tec = res.energy.total;
    out.mean_echo_sinr = res.mean_echo_sinr;
    out.sum_rate_I = res.sum_rate_I;
    out.sum_rate_II = res.sum_rate_II;
    out.execute_data_bits = res.execute_data_bits;
    out.iterations = res.iterations;
    out.converged = res.converged;
    out.max_residual = res.final_feasibility.max_residual;
    out.dl_total = res.state.alloc.dl.sum();
    out.dr_total = res.state.alloc.dr.sum();
    out.trace = res.trace;
    out.records = res.records;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  ExperimentResult result;
  result.plan = plan;
  result.config_hash = config_hash(plan.scenario);

  std::vector<double> values = plan.values;
  if (values.empty()) values.push_back(0.0);

  struct Job {
    int point_index;
    int draw;
  };
  std::vector<Job> jobs;
  for (std::size_t pi = 0; pi < values.size() * plan.modes.size(); ++pi)
    for (int d = 0; d < plan.draws; ++d) jobs.push_back({static_cast<int>(pi), d});

  // per-point scenario, geometry, registration (shared across draws)
  struct PointCtx {
    ScenarioConfig cfg;
    Geometry geom;
    RegistrationSpec reg;
  };
  std::vector<PointCtx> ctx;
  result.points.resize(values.size() * plan.modes.size());
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (std::size_t mi = 0; mi < plan.modes.size(); ++mi) {
      PointCtx c;
      c.cfg = plan.sweep == SweepVar::kNone ? plan.scenario
                                            : apply_sweep(plan.scenario, plan.sweep, values[vi]);
      c.cfg.baseline_mode = plan.modes[mi];
      c.cfg.rng_seed = plan.seed;
      c.geom = derive_geometry(c.cfg);
      c.reg = build_registration(c.cfg, c.geom);
      const std::size_t pi = vi * plan.modes.size() + mi;
      auto& pt = result.points[pi];
      pt.sweep = plan.sweep;
      pt.value = values[vi];
      pt.mode = plan.modes[mi];
      pt.draws.resize(plan.draws);
      ctx.push_back(std::move(c));
    }
  }

  std::mutex mtx;
  std::size_t next = 0;
  const unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
  auto worker = [&]() {
    for (;;) {
      std::size_t j;
      {
        std::lock_guard<std::mutex> lock(mtx);
        if (next >= jobs.size()) return;
        j = next++;
      }
      const Job& job = jobs[j];
      const PointCtx& c = ctx[job.point_index];
      DrawOutcome out = run_one(c.cfg, c.geom, c.reg, plan.bcd, job.draw);
      result.points[job.point_index].draws[job.draw] = out;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return result;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::vector<std::string> emit_outputs(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;

  const std::string summary_path = (fs::path(dir) / "summary.csv").string();
  {
    std::ofstream os(summary_path);
    if (!os) throw std::runtime_error("cannot write " + summary_path);
    os << "sweep,value,mode,draws_ok,tec_mean_j,tec_ci95_j,echo_sinr_mean,echo_sinr_ci95,"
          "sum_rate_I_bpshz,sum_rate_II_bpshz,execute_data_mean_bits,iterations_mean,"
          "converged_all,max_residual,dl_total_mean_bits,dr_total_mean_bits,seed,config_hash\n";
    for (const auto& p : result.points) {
      bool conv_all = true;
      double it_mean = 0.0;
      int n = 0;
      for (const auto& d : p.draws)
        if (d.ok) {
          conv_all = conv_all && d.converged;
          it_mean += d.iterations;
          ++n;
        }
      if (n) it_mean /= n;
      double worst_res = 0.0;
      for (const auto& d : p.draws)
        if (d.ok) worst_res = std::max(worst_res, d.max_residual);
      os << to_string(p.sweep) << ',' << fmt(p.value) << ',' << to_string(p.mode) << ','
         << p.ok_count() << ',' << fmt(p.mean(&DrawOutcome::tec)) << ','
         << fmt(p.ci95(&DrawOutcome::tec)) << ',' << fmt(p.mean(&DrawOutcome::mean_echo_sinr))
         << ',' << fmt(p.ci95(&DrawOutcome::mean_echo_sinr)) << ','
         << fmt(p.mean(&DrawOutcome::sum_rate_I)) << ','
         << fmt(p.mean(&DrawOutcome::sum_rate_II)) << ','
         << fmt(p.mean(&DrawOutcome::execute_data_bits)) << ',' << fmt(it_mean) << ','
         << (conv_all ? 1 : 0) << ',' << fmt(worst_res) << ','
         << fmt(p.mean(&DrawOutcome::dl_total)) << ',' << fmt(p.mean(&DrawOutcome::dr_total))
         << ',' << result.plan.seed << ',' << result.config_hash << '\n';
    }
  }
  written.push_back(summary_path);

  const std::string raw_path = (fs::path(dir) / "raw.csv").string();
  {
    std::ofstream os(raw_path);
    os << "sweep,value,mode,draw,ok,tec_j,echo_sinr,sum_rate_I,sum_rate_II,"
          "execute_data_bits,iterations,converged,max_residual,dl_total,dr_total,"
          "seed,config_hash,error\n";
    for (const auto& p : result.points)
      for (const auto& d : p.draws) {
        os << to_string(p.sweep) << ',' << fmt(p.value) << ',' << to_string(p.mode) << ','
           << d.draw << ',' << (d.ok ? 1 : 0) << ',' << fmt(d.tec) << ','
           << fmt(d.mean_echo_sinr) << ',' << fmt(d.sum_rate_I) << ',' << fmt(d.sum_rate_II)
           << ',' << fmt(d.execute_data_bits) << ',' << d.iterations << ','
           << (d.converged ? 1 : 0) << ',' << fmt(d.max_residual) << ',' << fmt(d.dl_total)
           << ',' << fmt(d.dr_total) << ',' << result.plan.seed << ',' << result.config_hash
           << ',' << (d.ok ? "" : d.error) << '\n';
      }
  }
  written.push_back(raw_path);

  const std::string jsonl_path = (fs::path(dir) / "runs.jsonl").string();
  {
    std::ofstream os(jsonl_path);
    for (const auto& p : result.points)
      for (const auto& d : p.draws) {
        nlohmann::json j{{"sweep", to_string(p.sweep)},
                         {"value", p.value},
                         {"mode", to_string(p.mode)},
                         {"draw", d.draw},
                         {"ok", d.ok},
                         {"tec_j", d.tec},
                         {"trace_j", d.trace},
                         {"iterations", d.iterations},
                         {"converged", d.converged},
                         {"seed", result.plan.seed},
                         {"config_hash", result.config_hash}};
        if (!d.ok) j["error"] = d.error;
        nlohmann::json iters = nlohmann::json::array();
        for (const auto& r : d.records) {
          iters.push_back({{"iteration", r.iteration},
                           {"objective_j", r.objective_j},
                           {"block_seconds", {r.block_seconds[0], r.block_seconds[1], r.block_seconds[2]}},
                           {"block_status", {r.block_status[0], r.block_status[1], r.block_status[2]}},
                           {"solves", r.solve_count}});
        }
        j["iterations_detail"] = iters;
        os << j.dump() << '\n';
      }
  }
  written.push_back(jsonl_path);

  const std::string plot_path = (fs::path(dir) / "plot_summary.py").string();
  {
    std::ofstream os(plot_path);
    os << "#!/usr/bin/env python3\n"
          "\"\"\"Plots the figure families from summary.csv (run from the output dir).\"\"\"\n"
          "import csv, collections\n"
          "import matplotlib\n"
          "matplotlib.use('Agg')\n"
          "import matplotlib.pyplot as plt\n\n"
          "rows = list(csv.DictReader(open('summary.csv')))\n"
          "metrics = [('tec_mean_j', 'total energy consumption [J]'),\n"
          "           ('echo_sinr_mean', 'average echo SINR'),\n"
          "           ('sum_rate_II_bpshz', 'offload sum-rate [bit/s/Hz]'),\n"
          "           ('execute_data_mean_bits', 'execute data [bits]')]\n"
          "for metric, label in metrics:\n"
          "    fig, ax = plt.subplots()\n"
          "    series = collections.defaultdict(list)\n"
          "    for r in rows:\n"
          "        series[r['mode']].append((float(r['value']), float(r[metric])))\n"
          "    for mode, pts in sorted(series.items()):\n"
          "        pts.sort()\n"
          "        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker='o', label=mode)\n"
          "    ax.set_xlabel(rows[0]['sweep'] if rows else 'value')\n"
          "    ax.set_ylabel(label)\n"
          "    ax.legend()\n"
          "    fig.savefig(metric + '.png', dpi=120, bbox_inches='tight')\n"
          "    print('wrote', metric + '.png')\n";
  }
  written.push_back(plot_path);
  return written;
}

bool check_trend(const ExperimentResult& result, BaselineMode mode,
                 double DrawOutcome::*metric, bool nondecreasing, double slack_rel,
                 std::string* detail) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : result.points) {
    if (p.mode != mode || p.ok_count() == 0) continue;
    pts.push_back({p.value, p.mean(metric)});
  }
  std::sort(pts.begin(), pts.end());
  bool ok = true;
  std::ostringstream os;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i].second, b = pts[i + 1].second;
    const double slack = slack_rel * std::max(std::abs(a), std::abs(b));
    const bool step_ok = nondecreasing ? b >= a - slack : b <= a + slack;
    ok = ok && step_ok;
    os << '(' << pts[i].first << "->" << pts[i + 1].first << ": " << a << "->" << b
       << (step_ok ? " ok) " : " VIOLATION) ");
  }
  if (detail) *detail = os.str();
  return ok && pts.size() >= 2;
}

}  // namespace triscc
