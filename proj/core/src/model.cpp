// SPDX-License-Identifier: Apache-2.0
#include "triscc/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace triscc {

BeamformerSet BeamformerSet::zeros(int K, int N_t) {
  BeamformerSet bf;
  for (int s = 0; s < 2; ++s) {
    bf.Wc[s].assign(K, MatC::Zero(N_t, N_t));
    bf.Ws[s].assign(K, MatC::Zero(N_t, N_t));
  }
  return bf;
}

Schedule Schedule::all_ones(int K, int M) {
  Schedule s;
  s.rho = MatR::Ones(K, M);
  s.rho_relaxed = MatR::Ones(K, M);
  s.p = MatR::Zero(K, M);
  return s;
}

Allocation Allocation::zeros(int K) {
  Allocation a;
  a.t1 = VecR::Zero(K);
  a.t2 = VecR::Zero(K);
  a.t3 = VecR::Zero(K);
  a.dl = VecR::Zero(K);
  a.dr = VecR::Zero(K);
  return a;
}

double rate_slot(const ScenarioConfig& cfg, const ChannelSet& ch,
                 const BeamformerSet& bf, Slot slot, int k) {
  const int N = cfg.N;
  MatC total = cfg.noise_power_w * MatC::Identity(N, N);
  for (int i = 0; i < cfg.K; ++i)
    total += ch.H[i] * bf.total(slot, i) * ch.H[i].adjoint();
  MatC R = total - ch.H[k] * bf.Wc[slot][k] * ch.H[k].adjoint();

  Eigen::LLT<MatC> lltR(R);
  if (lltR.info() != Eigen::Success) {
    throw InfeasibleError("interference covariance not positive definite");
  }
  // log2 det via Cholesky of both factors
  Eigen::LLT<MatC> lltT(total);
  if (lltT.info() != Eigen::Success) {
    throw InfeasibleError("received covariance not positive definite");
  }
  double ld_total = 0.0, ld_R = 0.0;
  for (int i = 0; i < N; ++i) {
    ld_total += 2.0 * std::log(std::abs(lltT.matrixL()(i, i)));
    ld_R += 2.0 * std::log(std::abs(lltR.matrixL()(i, i)));
  }
  return (ld_total - ld_R) / std::log(2.0);
}

namespace {

// sum_i z_{k,m,i} W̄_i^I z_{k,m,i}^H  (row-vector quadratic form)
double echo_power(const ChannelSet& ch, const BeamformerSet& bf, int k, int m) {
  double s = 0.0;
  for (int i = 0; i < ch.K; ++i) {
    const VecC& z = ch.z_at(k, m, i);
    s += (z.transpose() * bf.total(kSlotI, i) * z.conjugate())(0, 0).real();
  }
  return s;
}

}  // namespace

double echo_sinr(const ScenarioConfig& cfg, const ChannelSet& ch,
                 const BeamformerSet& bf, const Schedule& sched, int k, int m) {
  if (sched.rho(k, m) < 0.5) return 0.0;
  double num = echo_power(ch, bf, k, m);
  double den = cfg.noise_power_w;
  for (int j = 0; j < cfg.M; ++j) {
    if (j == m || sched.rho(k, j) < 0.5) continue;
    den += echo_power(ch, bf, k, j);
  }
  const double pmd = cfg.matching_degree;
  if (pmd < 1.0) {
    den += (1.0 - pmd) * num;
    num *= pmd;
  }
  return num / den;
}

double sensing_data(const ScenarioConfig& cfg, double sinr, double t1) {
  return cfg.sampling_frequency_hz * cfg.quantization_bits * sinr * t1;
}

double energy_local(const ScenarioConfig& cfg, double dl_bits, double t1) {
  const double T = cfg.frame_duration_s;
  if (t1 >= T) throw InfeasibleError("local computation has no time: t1 >= T");
  const double cycles = cfg.cycles_per_bit_local * dl_bits;
  return cfg.capacitance_local * cycles * cycles * cycles / ((T - t1) * (T - t1));
}

double energy_remote(const ScenarioConfig& cfg, double dr_bits, double t3) {
  if (dr_bits <= 0.0) return 0.0;
  if (t3 <= 0.0) throw InfeasibleError("remote computation has no time: t3 <= 0");
  const double cycles = cfg.cycles_per_bit_remote * dr_bits;
  return cfg.capacitance_remote * cycles * cycles * cycles / (t3 * t3);
}

EnergyReport total_energy(const ScenarioConfig& cfg, const BeamformerSet& bf,
                          const Allocation& alloc) {
  const int K = cfg.K;
  EnergyReport rep;
  rep.Et1.resize(K);
  rep.Et2.resize(K);
  rep.El.resize(K);
  rep.Er.resize(K);
  for (int k = 0; k < K; ++k) {
    rep.Et1(k) = bf.total(kSlotI, k).trace().real() * alloc.t1(k);
    rep.Et2(k) = bf.total(kSlotII, k).trace().real() * alloc.t2(k);
    rep.El(k) = energy_local(cfg, alloc.dl(k), alloc.t1(k));
    rep.Er(k) = energy_remote(cfg, alloc.dr(k), alloc.t3(k));
  }
  rep.total = rep.Et1.sum() + rep.Et2.sum() + rep.El.sum() + rep.Er.sum();
  return rep;
}

std::string FeasibilityReport::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "constraint,residual\n";
  for (const auto& r : residuals) os << r.name << ',' << r.value << '\n';
  return os.str();
}

FeasibilityReport check_feasibility(const ScenarioConfig& cfg, const ChannelSet& ch,
                                    const BeamformerSet& bf, const Schedule& sched,
                                    const Allocation& alloc, const RegistrationSpec& reg,
                                    const VecR& demand_bits) {
  FeasibilityReport rep;
  auto push = [&rep](const std::string& name, double v) {
    rep.residuals.push_back({name, v});
  };
  const int K = cfg.K, M = cfg.M;
  const double Pt = cfg.element_power_max_w;
  const double T = cfg.frame_duration_s;

  const bool trace_cap = cfg.baseline_mode == BaselineMode::kTct;
  for (int s = 0; s < 2; ++s) {
    const char* sl = s == 0 ? "I" : "II";
    for (int k = 0; k < K; ++k) {
      const MatC W = bf.total(static_cast<Slot>(s), k);
      if (trace_cap) {
        const double cap = cfg.N_t() * Pt;
        push("power_trace_" + std::string(sl) + "_" + std::to_string(k),
             (W.trace().real() - cap) / cap);
      } else {
        double worst = -1e300;
        for (int n = 0; n < W.rows(); ++n) worst = std::max(worst, W(n, n).real() - Pt);
        push("power_diag_" + std::string(sl) + "_" + std::to_string(k), worst / Pt);
      }

      auto min_eig = [](const MatC& X) {
        Eigen::SelfAdjointEigenSolver<MatC> es(X, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
      };
      const double tc = std::max(bf.Wc[s][k].trace().real(), 1e-30);
      const double ts = std::max(bf.Ws[s][k].trace().real(), 1e-30);
      push("psd_c_" + std::string(sl) + "_" + std::to_string(k), -min_eig(bf.Wc[s][k]) / tc);
      push("psd_s_" + std::string(sl) + "_" + std::to_string(k), -min_eig(bf.Ws[s][k]) / ts);

      Eigen::SelfAdjointEigenSolver<MatC> es(bf.Wc[s][k], Eigen::EigenvaluesOnly);
      const auto& ev = es.eigenvalues();  // ascending
      const int idx = static_cast<int>(ev.size()) - (cfg.G + 1);
      const double eG1 = idx >= 0 ? ev(idx) : 0.0;
      push("rank_surrogate_" + std::string(sl) + "_" + std::to_string(k), eG1 / tc);
    }
  }

  std::vector<MatC> W2(K);
  for (int k = 0; k < K; ++k) W2[k] = bf.total(kSlotII, k);
  const double gamma = reg.gamma_th;
  push("registration", (registration_error(reg, W2) - gamma) / std::max(gamma, 1e-30));

  for (int k = 0; k < K; ++k) {
    const double r1 = rate_slot(cfg, ch, bf, kSlotI, k);
    push("rate_I_" + std::to_string(k),
         (cfg.rate_threshold_bpshz - r1) / std::max(cfg.rate_threshold_bpshz, 1e-30));
    push("time_budget_" + std::to_string(k),
         (alloc.t1(k) + alloc.t2(k) + alloc.t3(k) - T) / T);
    push("time_nonneg_" + std::to_string(k),
         -std::min({alloc.t1(k), alloc.t2(k), alloc.t3(k)}) / T);
    push("data_nonneg_" + std::to_string(k),
         -std::min(alloc.dl(k), alloc.dr(k)) /
             std::max(demand_bits.size() ? demand_bits(k) : 1.0, 1.0));

    const double fl = cfg.cycles_per_bit_local * alloc.dl(k) / (T - alloc.t1(k));
    push("cpu_local_" + std::to_string(k),
         (fl - cfg.cpu_freq_max_local_hz) / cfg.cpu_freq_max_local_hz);

    const double r2 = rate_slot(cfg, ch, bf, kSlotII, k);
    const double cap = alloc.t2(k) * r2 * cfg.bandwidth_hz;
    const double dscale = std::max(alloc.dr(k), std::max(cap, 1.0));
    push("offload_" + std::to_string(k), (alloc.dr(k) - cap) / dscale);

    double D_k = 0.0;
    for (int m = 0; m < M; ++m)
      D_k += sensing_data(cfg, echo_sinr(cfg, ch, bf, sched, k, m), alloc.t1(k));
    const double dem = demand_bits.size() ? demand_bits(k) : 0.0;
    const double need = std::max(D_k, dem);
    push("data_balance_" + std::to_string(k),
         (need - alloc.dl(k) - alloc.dr(k)) / std::max(need, 1.0));
  }

  double fr = 0.0;
  for (int k = 0; k < K; ++k)
    if (alloc.dr(k) > 0.0) fr += cfg.cycles_per_bit_remote * alloc.dr(k) / alloc.t3(k);
  push("cpu_remote", (fr - cfg.cpu_freq_max_remote_hz) / cfg.cpu_freq_max_remote_hz);

  for (int k = 0; k < K; ++k) {
    const double rs = sched.rho.row(k).sum();
    push("sched_row_" + std::to_string(k),
         std::max(1.0 - rs, rs - static_cast<double>(M)) / M);
  }
  for (int m = 0; m < M; ++m) {
    const double cs = sched.rho.col(m).sum();
    push("sched_col_" + std::to_string(m),
         std::max(1.0 - cs, cs - static_cast<double>(K)) / K);
  }

  if (cfg.echo_sinr_floor > 0.0) {
    double worst = -1e300;
    for (int k = 0; k < K; ++k)
      for (int m = 0; m < M; ++m)
        if (sched.rho(k, m) > 0.5)
          worst = std::max(worst, (cfg.echo_sinr_floor - echo_sinr(cfg, ch, bf, sched, k, m)) /
                                      cfg.echo_sinr_floor);
    push("echo_sinr_floor", worst);
  }

  rep.max_residual = -1e300;
  for (const auto& r : rep.residuals) rep.max_residual = std::max(rep.max_residual, r.value);
  return rep;
}

}  // namespace triscc
