// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "triscc/conic/hermitian.hpp"
#include "triscc/optimizer.hpp"

namespace triscc {

using conic::LinExpr;
using conic::Problem;

namespace {

// sum_i z W_i z^H with the slot-I totals, noise-normalized
double quad_const(const ScenarioConfig& cfg, const ChannelSet& ch,
                  const BeamformerSet& bf, int k, int m) {
  const double s2 = cfg.noise_power_w;
  double v = 0.0;
  for (int i = 0; i < cfg.K; ++i) {
    const VecC& z = ch.z_at(k, m, i);
    v += (z.transpose() * bf.total(kSlotI, i) * z.conjugate())(0, 0).real() / s2;
  }
  return v;
}

MatR pinned_p(const ScenarioConfig& cfg, const ChannelSet& ch, const BcdState& state,
              const MatR& rho) {
  MatR p = MatR::Zero(cfg.K, cfg.M);
  Schedule sched = state.sched;
  sched.rho = rho;
  for (int k = 0; k < cfg.K; ++k)
    for (int m = 0; m < cfg.M; ++m)
      if (rho(k, m) > 0.5) p(k, m) = echo_sinr(cfg, ch, state.bf, sched, k, m);
  return p;
}

bool p_consistent(const ScenarioConfig& cfg, const BcdState& state, const MatR& p) {
  const double fsqb = cfg.sampling_frequency_hz * cfg.quantization_bits;
  for (int k = 0; k < cfg.K; ++k) {
    const double acq = fsqb * state.alloc.t1(k) * p.row(k).sum();
    const double cover = state.alloc.dl(k) + state.alloc.dr(k);
    if (acq > cover * (1.0 + 1e-9) + 1.0) return false;       // (dd) coverage
    if (acq < state.demand_bits(k) * (1.0 - 1e-9) - 1.0) return false;  // sensing task
    if (cfg.echo_sinr_floor > 0.0) {
      for (int m = 0; m < cfg.M; ++m)
        if (p(k, m) > 0.0 && p(k, m) < cfg.echo_sinr_floor * (1.0 - 1e-9)) return false;
    }
  }
  return true;
}

}  // namespace

std::string block1_schedule(const ScenarioConfig& cfg, const ChannelSet& ch,
                            BcdState& state, const BcdOptions& opts) {
  const int K = cfg.K, M = cfg.M;

  // feasibility LP over the relaxed schedule at fixed p
  Problem prob;
  std::vector<int> rho_vars = prob.add_vars(K * M);
  auto rv = [&](int k, int m) { return LinExpr::var(rho_vars[k * M + m]); };
  LinExpr obj;
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m) {
      prob.add_ge(rv(k, m));
      prob.add_le(rv(k, m) - 1.0);
      obj += (1.0 + 1e-6 * (k * M + m)) * rv(k, m);  // lexicographic tie-break
    }
  for (int k = 0; k < K; ++k) {
    LinExpr row_sum;
    for (int m = 0; m < M; ++m) row_sum += rv(k, m);
    prob.add_ge(row_sum - 1.0);
    prob.add_le(row_sum - static_cast<double>(M));
  }
  for (int m = 0; m < M; ++m) {
    LinExpr col_sum;
    for (int k = 0; k < K; ++k) col_sum += rv(k, m);
    prob.add_ge(col_sum - 1.0);
    prob.add_le(col_sum - static_cast<double>(K));
  }
  // fractional-constraint transform rows at the incumbent p
  const double pmd = cfg.matching_degree;
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      const double pkm = state.sched.p(k, m);
      if (pkm <= 0.0) continue;
      LinExpr row;
      const double Qm = quad_const(cfg, ch, state.bf, k, m);
      row += (pmd * Qm / pkm) * rv(k, m);
      row -= ((1.0 - pmd) * Qm) * rv(k, m);
      for (int j = 0; j < M; ++j) {
        if (j == m) continue;
        row -= quad_const(cfg, ch, state.bf, k, j) * rv(k, j);
      }
      row.constant -= 1.0;
      prob.add_le(std::move(row));
    }
  }
  prob.set_objective(obj);
  auto res = prob.solve(opts.solver);
  if (!res.ok()) return "lp:" + to_string(res.status);

  MatR relaxed(K, M);
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m) relaxed(k, m) = std::clamp(res.x(rho_vars[k * M + m]), 0.0, 1.0);

  // threshold rounding with row/column repair
  MatR rho = (relaxed.array() >= opts.rho_round_threshold).cast<double>();
  for (int k = 0; k < K; ++k) {
    if (rho.row(k).sum() < 0.5) {
      int best = 0;
      relaxed.row(k).maxCoeff(&best);
      rho(k, best) = 1.0;
    }
  }
  for (int m = 0; m < M; ++m) {
    if (rho.col(m).sum() < 0.5) {
      int best = 0;
      relaxed.col(m).maxCoeff(&best);
      rho(best, m) = 1.0;
    }
  }

  // p re-tightened at the rounded schedule; keep the previous schedule when
  // coverage, the acquisition floor, or the SINR floor would break
  MatR p_new = pinned_p(cfg, ch, state, rho);
  if (!p_consistent(cfg, state, p_new)) {
    MatR p_keep = pinned_p(cfg, ch, state, state.sched.rho);
    if (p_consistent(cfg, state, p_keep)) {
      state.sched.p = p_keep;
      state.sched.rho_relaxed = relaxed;
      return "kept-schedule";
    }
    return "kept-p";
  }
  state.sched.rho = rho;
  state.sched.rho_relaxed = relaxed;
  state.sched.p = p_new;
  return "ok";
}

std::optional<Allocation> block3_allocation(const ScenarioConfig& cfg,
                                            const BcdState& state,
                                            const BcdOptions& opts,
                                            std::string& status) {
  const int K = cfg.K;
  const double T = cfg.frame_duration_s;
  const double DS = 1e6;  // bits per data unit, keeps the problem O(1)
  const double fsqb = cfg.sampling_frequency_hz * cfg.quantization_bits;

  Problem prob;
  auto t1 = prob.add_vars(K), t2 = prob.add_vars(K), t3 = prob.add_vars(K);
  auto dl = prob.add_vars(K), dr = prob.add_vars(K);
  LinExpr obj;
  for (int k = 0; k < K; ++k) {
    for (int v : {t1[k], t2[k], t3[k], dl[k], dr[k]}) prob.add_ge(LinExpr::var(v));
    prob.add_le(LinExpr::var(t1[k]) + LinExpr::var(t2[k]) + LinExpr::var(t3[k]) - T);
    prob.add_le(LinExpr::var(t1[k]) - (1.0 - 1e-3) * T);  // keeps T - t1 > 0

    const double trI = state.bf.total(kSlotI, k).trace().real();
    const double trII = state.bf.total(kSlotII, k).trace().real();
    obj += trI * LinExpr::var(t1[k]) + trII * LinExpr::var(t2[k]);

    // local/remote computation energies via power cones
    const double xl_coef = cfg.cycles_per_bit_local * DS * std::cbrt(cfg.capacitance_local);
    LinExpr y_l = LinExpr(T) - LinExpr::var(t1[k]);
    obj += conic::cubic_over_square_epigraph(prob, LinExpr::var(dl[k], xl_coef), y_l);
    const double xr_coef = cfg.cycles_per_bit_remote * DS * std::cbrt(cfg.capacitance_remote);
    obj += conic::cubic_over_square_epigraph(prob, LinExpr::var(dr[k], xr_coef),
                                             LinExpr::var(t3[k]));

    // local CPU cap, linearized form
    prob.add_le(LinExpr::var(dl[k], cfg.cycles_per_bit_local * DS / cfg.cpu_freq_max_local_hz) +
                LinExpr::var(t1[k]) - T);
    // offload capacity at the frozen slot-II rate
    const double cap = std::max(state.rate2(k), 0.0) * cfg.bandwidth_hz;
    if (cap > 1e-9) {
      prob.add_le(LinExpr::var(dr[k], DS / cap) - LinExpr::var(t2[k]));
    } else {
      prob.add_eq(LinExpr::var(dr[k]));
    }
    // computed data covers the acquisition and the sensing task
    const double psum = state.sched.p.row(k).sum();
    prob.add_ge(LinExpr::var(dl[k]) + LinExpr::var(dr[k]) -
                LinExpr::var(t1[k], fsqb * psum / DS));
    const double dem = state.demand_bits(k);
    if (dem > 0.0) {
      prob.add_ge(LinExpr::var(dl[k]) + LinExpr::var(dr[k]) - dem / DS);
      if (psum <= 0.0) {
        status = "no-acquisition";
        return std::nullopt;
      }
      prob.add_ge(LinExpr::var(t1[k]) - dem / (fsqb * psum));
    }
    if (cfg.baseline_mode == BaselineMode::kIlc) prob.add_eq(LinExpr::var(dr[k]));
    if (cfg.baseline_mode == BaselineMode::kMrc) prob.add_eq(LinExpr::var(dl[k]));
  }
  // shared remote CPU cap, successive-convex form expanded at the incumbent
  LinExpr tm;
  for (int k = 0; k < K; ++k) {
    const double t30 = std::max(state.alloc.t3(k), 1e-4);
    const double dr0 = state.alloc.dr(k) / DS;
    const double cr = cfg.cycles_per_bit_remote * DS / cfg.cpu_freq_max_remote_hz;
    tm += LinExpr(cr * dr0 / t30);
    tm += LinExpr::var(dr[k], cr / t30) - LinExpr(cr * dr0 / t30);
    tm -= LinExpr::var(t3[k], cr * dr0 / (t30 * t30));
    tm += LinExpr(cr * dr0 / t30);
  }
  tm.constant -= 1.0;
  prob.add_le(std::move(tm));

  prob.set_objective(obj);
  auto res = prob.solve(opts.solver);
  status = to_string(res.status);
  if (!res.ok()) return std::nullopt;

  Allocation out = Allocation::zeros(K);
  for (int k = 0; k < K; ++k) {
    out.t1(k) = std::max(res.x(t1[k]), 0.0);
    out.t2(k) = std::max(res.x(t2[k]), 0.0);
    out.t3(k) = std::max(res.x(t3[k]), 0.0);
    out.dl(k) = std::max(res.x(dl[k]), 0.0) * DS;
    out.dr(k) = std::max(res.x(dr[k]), 0.0) * DS;
  }
  return out;
}

}  // namespace triscc
