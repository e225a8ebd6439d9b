// SPDX-License-Identifier: Apache-2.0
#include <Eigen/SVD>
#include <chrono>
#include <cmath>

#include "triscc/optimizer.hpp"

namespace triscc {

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double min_rate(const ScenarioConfig& cfg, const ChannelSet& ch, const BeamformerSet& bf,
                Slot slot) {
  double r = 1e300;
  for (int k = 0; k < cfg.K; ++k) r = std::min(r, rate_slot(cfg, ch, bf, slot, k));
  return r;
}

double max_diag_total(const ScenarioConfig& cfg, const BeamformerSet& bf, Slot slot) {
  double v = 0.0;
  for (int k = 0; k < cfg.K; ++k)
    v = std::max(v, bf.total(slot, k).diagonal().real().maxCoeff());
  return v;
}

MatR echo_matrix(const ScenarioConfig& cfg, const ChannelSet& ch, const BeamformerSet& bf,
                 const Schedule& sched) {
  MatR p = MatR::Zero(cfg.K, cfg.M);
  for (int k = 0; k < cfg.K; ++k)
    for (int m = 0; m < cfg.M; ++m)
      if (sched.rho(k, m) > 0.5) p(k, m) = echo_sinr(cfg, ch, bf, sched, k, m);
  return p;
}

double total_energy_j(const ScenarioConfig& cfg, const BeamformerSet& bf,
                      const Allocation& alloc) {
  return total_energy(cfg, bf, alloc).total;
}

}  // namespace

BcdState init_feasible(const ScenarioConfig& cfg, const ChannelSet& ch,
                       const RegistrationSpec& reg) {
  const int K = cfg.K, M = cfg.M, N_t = cfg.N_t(), G = cfg.G;
  const double Pt = cfg.element_power_max_w;
  const double T = cfg.frame_duration_s;
  const double fsqb = cfg.sampling_frequency_hz * cfg.quantization_bits;
  const bool tct = cfg.baseline_mode == BaselineMode::kTct;

  BcdState st;
  st.bf = BeamformerSet::zeros(K, N_t);
  st.sched = Schedule::all_ones(K, M);

  // rank-G communication beams along the channel's top right-singular vectors
  std::vector<MatC> comm_dir(K);
  for (int k = 0; k < K; ++k) {
    Eigen::JacobiSVD<MatC> svd(ch.H[k], Eigen::ComputeFullV);
    const MatC V = svd.matrixV().leftCols(G);
    MatC Wd = V * V.adjoint();
    Wd *= 1.0 / std::max(Wd.diagonal().real().maxCoeff(), 1e-12);
    comm_dir[k] = Wd;  // max diagonal = 1
  }

  // slot-I illumination: spread for the per-element cap, concentrated lobe
  // beams at the trace budget for the traditional transceiver
  for (int k = 0; k < K; ++k) {
    st.bf.Wc[kSlotI][k] = 0.05 * Pt * comm_dir[k];
    if (!tct)
      st.bf.Ws[kSlotI][k] = cfg.init_sensing_fraction * Pt * MatC::Identity(N_t, N_t);
  }
  if (tct) {
    // directional sensing at half the trace budget, split across targets
    const Geometry geom = derive_geometry(cfg);
    for (int k = 0; k < K; ++k) {
      MatC Wm = MatC::Zero(N_t, N_t);
      for (int m = 0; m < M; ++m) {
        const VecC a = upa_steering(geom.pitch_dev_tgt(k, m), geom.azim_dev_tgt(k, m),
                                    cfg.N_r, cfg.N_c);
        Wm += a * a.adjoint();
      }
      Wm *= (0.5 * N_t * Pt) / std::max(Wm.trace().real(), 1e-12);
      st.bf.Ws[kSlotI][k] = Wm;
    }
  }

  // scale communication beams until the slot-I rate threshold holds
  for (int it = 0;; ++it) {
    if (min_rate(cfg, ch, st.bf, kSlotI) >= cfg.rate_threshold_bpshz * 1.02) break;
    if (it > 80) throw InfeasibleError("init: rate threshold unreachable in slot I");
    for (int k = 0; k < K; ++k) st.bf.Wc[kSlotI][k] *= 1.25;
    const bool over = tct ? false : max_diag_total(cfg, st.bf, kSlotI) > Pt;
    if (over) throw InfeasibleError("init: element power exhausted before rate threshold");
  }

  // slot II: mask-fit sensing covariances, small communication beams
  for (int k = 0; k < K; ++k) {
    st.bf.Ws[kSlotII][k] = reg.fit_W[k];
    st.bf.Wc[kSlotII][k] = 1e-4 * comm_dir[k];
  }

  // echo floor (when configured): raise illumination until every scheduled
  // pair clears it
  if (cfg.echo_sinr_floor > 0.0) {
    for (int it = 0;; ++it) {
      const MatR p = echo_matrix(cfg, ch, st.bf, st.sched);
      double worst = 1e300;
      for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m)
          if (st.sched.rho(k, m) > 0.5) worst = std::min(worst, p(k, m));
      if (worst >= cfg.echo_sinr_floor * 1.05) break;
      if (it > 120) throw InfeasibleError("init: echo-SINR floor unreachable");
      for (int k = 0; k < K; ++k) st.bf.Ws[kSlotI][k] *= 1.2;
      if (!tct && max_diag_total(cfg, st.bf, kSlotI) > Pt)
        throw InfeasibleError("init: element power exhausted before echo floor");
    }
  }

  // capacity-aware acquisition: shrink illumination until the acquired data
  // fits the compute capacity
  st.alloc = Allocation::zeros(K);
  st.alloc.t1.setConstant(T / 3.0);
  st.alloc.t2.setConstant(T / 3.0);
  st.alloc.t3.setConstant(T / 3.0);
  auto capacity = [&](int k) {
    const double local = cfg.cpu_freq_max_local_hz * (T - st.alloc.t1(k)) /
                         cfg.cycles_per_bit_local;
    const double remote = cfg.cpu_freq_max_remote_hz * st.alloc.t3(k) /
                          (cfg.cycles_per_bit_remote * K);
    switch (cfg.baseline_mode) {
      case BaselineMode::kIlc: return 0.9 * local;
      case BaselineMode::kMrc: return 0.9 * remote;
      default: return 0.9 * (local + remote);
    }
  };
  MatR p = echo_matrix(cfg, ch, st.bf, st.sched);
  for (int it = 0;; ++it) {
    bool fits = true;
    for (int k = 0; k < K; ++k)
      if (fsqb * st.alloc.t1(k) * p.row(k).sum() > capacity(k)) fits = false;
    if (fits) break;
    if (cfg.echo_sinr_floor > 0.0 || it > 200)
      throw InfeasibleError("init: acquisition exceeds compute capacity");
    for (int k = 0; k < K; ++k) st.bf.Ws[kSlotI][k] *= 0.8;
    p = echo_matrix(cfg, ch, st.bf, st.sched);
  }
  st.sched.p = p;

  // sensing-task demand
  st.demand_bits.resize(K);
  for (int k = 0; k < K; ++k) {
    const double acq = fsqb * st.alloc.t1(k) * p.row(k).sum();
    st.demand_bits(k) = cfg.execute_data_target_bits > 0.0
                            ? cfg.execute_data_target_bits
                            : cfg.demand_fraction * acq;
  }
  if (cfg.execute_data_target_bits > 0.0) {
    for (int k = 0; k < K; ++k) {
      const double psum = p.row(k).sum();
      if (psum <= 0.0) throw InfeasibleError("init: no echo power for the data target");
      const double t1_need = st.demand_bits(k) / (fsqb * psum);
      if (t1_need > 0.8 * T)
        throw InfeasibleError("init: data target beyond acquisition capability");
      st.alloc.t1(k) = std::max(T / 3.0, 1.02 * t1_need);
      st.alloc.t2(k) = (T - st.alloc.t1(k)) / 2.0;
      st.alloc.t3(k) = (T - st.alloc.t1(k)) / 2.0;
    }
  }

  // data split onto the CPU caps
  for (int k = 0; k < K; ++k) {
    const double acq = fsqb * st.alloc.t1(k) * p.row(k).sum();
    const double need = std::max(acq, st.demand_bits(k));
    const double local_cap =
        0.95 * cfg.cpu_freq_max_local_hz * (T - st.alloc.t1(k)) / cfg.cycles_per_bit_local;
    switch (cfg.baseline_mode) {
      case BaselineMode::kIlc:
        if (need > local_cap) throw InfeasibleError("init: local CPU cannot absorb the task");
        st.alloc.dl(k) = need;
        st.alloc.dr(k) = 0.0;
        break;
      case BaselineMode::kMrc:
        st.alloc.dl(k) = 0.0;
        st.alloc.dr(k) = need;
        break;
      default:
        st.alloc.dl(k) = std::min(need, local_cap);
        st.alloc.dr(k) = need - st.alloc.dl(k);
        break;
    }
  }
  double remote_load = 0.0;
  for (int k = 0; k < K; ++k)
    if (st.alloc.dr(k) > 0.0)
      remote_load += cfg.cycles_per_bit_remote * st.alloc.dr(k) / st.alloc.t3(k);
  if (remote_load > 0.98 * cfg.cpu_freq_max_remote_hz)
    throw InfeasibleError("init: remote CPU cannot absorb the task");

  // slot-II communication beams large enough to carry the offload
  for (int it = 0;; ++it) {
    bool ok = true;
    for (int k = 0; k < K; ++k) {
      const double r2 = rate_slot(cfg, ch, st.bf, kSlotII, k);
      if (st.alloc.dr(k) > 0.95 * st.alloc.t2(k) * r2 * cfg.bandwidth_hz) ok = false;
    }
    if (ok) break;
    if (it > 80) throw InfeasibleError("init: offload rate unreachable in slot II");
    for (int k = 0; k < K; ++k) st.bf.Wc[kSlotII][k] *= 1.3;
    if (!tct && max_diag_total(cfg, st.bf, kSlotII) > Pt)
      throw InfeasibleError("init: element power exhausted for the offload rate");
  }

  st.rate2.resize(K);
  for (int k = 0; k < K; ++k) st.rate2(k) = rate_slot(cfg, ch, st.bf, kSlotII, k);
  st.energy = total_energy_j(cfg, st.bf, st.alloc);
  return st;
}

BcdResult run_bcd(const ScenarioConfig& cfg, const ChannelSet& ch,
                  const RegistrationSpec& reg, const BcdOptions& opts) {
  BcdResult out;
  BcdState st = init_feasible(cfg, ch, reg);
  out.trace.push_back(st.energy);

  const bool use_block1 = cfg.baseline_mode != BaselineMode::kNc;
  for (int it = 0; it < opts.max_outer; ++it) {
    IterationRecord rec;
    rec.iteration = it + 1;

    double t0 = now_s();
    if (use_block1) {
      rec.block_status[0] = block1_schedule(cfg, ch, st, opts);
    } else {
      // stand-alone mode keeps the all-ones schedule; p is re-tightened only
      MatR p = echo_matrix(cfg, ch, st.bf, st.sched);
      bool ok = true;
      const double fsqb = cfg.sampling_frequency_hz * cfg.quantization_bits;
      for (int k = 0; k < cfg.K; ++k) {
        const double acq = fsqb * st.alloc.t1(k) * p.row(k).sum();
        if (acq > st.alloc.dl(k) + st.alloc.dr(k) + 1.0) ok = false;
        if (acq < st.demand_bits(k) - 1.0) ok = false;
      }
      if (ok) st.sched.p = p;
      rec.block_status[0] = ok ? "ok" : "kept-p";
    }
    rec.block_seconds[0] = now_s() - t0;

    t0 = now_s();
    std::string b2status;
    BeamformerSet cand = block2_beamforming(cfg, ch, reg, st, opts, b2status, &rec.solve_count);
    const double e_cand = total_energy_j(cfg, cand, st.alloc);
    if (e_cand <= st.energy + 1e-12) {
      st.bf = cand;
      st.energy = e_cand;
      // the echo rows are pinned, but re-tighten against solver slack
      st.sched.p = echo_matrix(cfg, ch, st.bf, st.sched);
    } else {
      b2status += " rejected";
    }
    rec.block_status[1] = b2status;
    rec.block_seconds[1] = now_s() - t0;
    for (int k = 0; k < cfg.K; ++k) st.rate2(k) = rate_slot(cfg, ch, st.bf, kSlotII, k);

    t0 = now_s();
    std::string b3status;
    auto alloc = block3_allocation(cfg, st, opts, b3status);
    if (alloc) {
      const double e_new = total_energy_j(cfg, st.bf, *alloc);
      if (e_new <= st.energy + 1e-12) {
        st.alloc = *alloc;
        st.energy = e_new;
      } else {
        b3status += " rejected";
      }
    }
    rec.block_status[2] = b3status;
    rec.block_seconds[2] = now_s() - t0;

    rec.objective_j = st.energy;
    out.records.push_back(rec);
    out.trace.push_back(st.energy);
    out.iterations = it + 1;

    const double prev = out.trace[out.trace.size() - 2];
    if (std::abs(prev - st.energy) <= cfg.bcd_epsilon * std::max(std::abs(prev), 1e-30)) {
      out.converged = true;
      break;
    }
  }

  out.state = st;
  out.energy = total_energy(cfg, st.bf, st.alloc);
  const double fsqb = cfg.sampling_frequency_hz * cfg.quantization_bits;
  double sinr_sum = 0.0;
  int sinr_n = 0;
  for (int k = 0; k < cfg.K; ++k) {
    out.sum_rate_I += rate_slot(cfg, ch, st.bf, kSlotI, k);
    out.sum_rate_II += rate_slot(cfg, ch, st.bf, kSlotII, k);
    for (int m = 0; m < cfg.M; ++m) {
      if (st.sched.rho(k, m) > 0.5) {
        const double s = echo_sinr(cfg, ch, st.bf, st.sched, k, m);
        sinr_sum += s;
        ++sinr_n;
        out.execute_data_bits += fsqb * s * st.alloc.t1(k);
      }
    }
  }
  out.mean_echo_sinr = sinr_n ? sinr_sum / sinr_n : 0.0;
  out.final_feasibility =
      check_feasibility(cfg, ch, st.bf, st.sched, st.alloc, reg, st.demand_bits);
  return out;
}

BcdResult run_baseline(const ScenarioConfig& cfg, const ChannelSet& ch,
                       const RegistrationSpec& reg, const BcdOptions& opts) {
  if (cfg.baseline_mode == BaselineMode::kProposed) {
    throw ConfigError("baseline_mode", "run_baseline expects a non-PROPOSED mode");
  }
  return run_bcd(cfg, ch, reg, opts);
}

}  // namespace triscc
