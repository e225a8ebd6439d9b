// SPDX-License-Identifier: Apache-2.0
#include "triscc/registration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "triscc/channels.hpp"
#include "triscc/conic/hermitian.hpp"

namespace triscc {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::pair<double, double> footprint_axes(double R, double theta, double dth, double dph) {
  if (std::abs(theta) >= kPi / 2.0) {
    throw DegenerateGeometryError("grazing incidence: beam does not intersect the plane");
  }
  const double ra = R * std::tan(dth / 2.0) / std::cos(theta);
  const double rb = R * std::tan(dph / 2.0);
  return {ra, rb};
}

BeamwidthPlan adjust_beamwidths(const Geometry& geom, double ref_azimuth_width) {
  const int K = static_cast<int>(geom.d_dev_tgt.rows());
  const int M = static_cast<int>(geom.d_dev_tgt.cols());
  if (K == 0 || M == 0) throw InfeasibleError("no device-target pairs to register");

  std::vector<std::pair<double, std::pair<int, int>>> dist;
  dist.reserve(K * M);
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m) dist.push_back({geom.d_dev_tgt(k, m), {k, m}});
  std::sort(dist.begin(), dist.end());
  const auto& med = dist[dist.size() / 2];

  BeamwidthPlan plan;
  plan.R0 = med.first;
  plan.theta0 = geom.pitch_dev_tgt(med.second.first, med.second.second);
  plan.phi0 = geom.azim_dev_tgt(med.second.first, med.second.second);
  plan.delta_phi0 = ref_azimuth_width;
  plan.delta_theta0 = 2.0 * std::atan(std::cos(plan.theta0) * std::tan(ref_azimuth_width / 2.0));
  plan.delta_theta.resize(K, M);
  plan.delta_phi.resize(K, M);
  const double t0 = std::tan(ref_azimuth_width / 2.0);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      // equal footprint: R tan(dphi/2) = R0 tan(dphi0/2)
      const double tp = plan.R0 * t0 / geom.d_dev_tgt(k, m);
      plan.delta_phi(k, m) = 2.0 * std::atan(tp);
      // circularization: tan(dth/2) = cos(theta) tan(dphi/2)
      plan.delta_theta(k, m) = 2.0 * std::atan(std::cos(geom.pitch_dev_tgt(k, m)) * tp);
    }
  }
  return plan;
}

MatR desired_response(const VecR& theta_grid, const VecR& phi_grid,
                      const std::vector<std::pair<double, double>>& lobes,
                      double width_theta, double width_phi) {
  const int Lt = static_cast<int>(theta_grid.size());
  const int Lp = static_cast<int>(phi_grid.size());
  const double half_power = std::log(2.0 * std::sqrt(2.0) - 1.0);
  MatR R = MatR::Zero(Lt, Lp);
  for (const auto& [te, pe] : lobes) {
    for (int i = 0; i < Lt; ++i) {
      const double dt = (theta_grid(i) - te) / (width_theta / 2.0);
      for (int j = 0; j < Lp; ++j) {
        const double dp = (phi_grid(j) - pe) / (width_phi / 2.0);
        const double ex = (dt * dt + dp * dp) * half_power;
        if (ex < 500.0) R(i, j) += 2.0 / (1.0 + std::exp(ex));
      }
    }
  }
  return R;
}

double registration_error(const RegistrationSpec& reg, const std::vector<MatC>& W_total_II) {
  double err = 0.0;
  for (std::size_t k = 0; k < W_total_II.size(); ++k) {
    MatC gram = reg.A.adjoint() * W_total_II[k] * reg.A;
    err += (gram - reg.Rad[k].cast<cxd>()).squaredNorm();
  }
  return err;
}

namespace {

// Rank-free best mask fit: min ||A^H W A - Rad||_F s.t. W >= 0, diag <= budget.
// Deterministic per geometry; used for the init point and the auto gamma_th.
std::pair<MatC, double> registration_fit(const RegistrationSpec& reg, int N_t,
                                         double diag_budget, int device) {
  using namespace conic;
  Problem prob;
  HermitianVar W(prob, N_t);
  W.add_psd(prob);
  for (int n = 0; n < N_t; ++n) prob.add_le(W.diag_entry(n) - diag_budget);

  const int L = reg.L;
  std::vector<LinExpr> soc;
  const int tvar = prob.add_var();
  soc.push_back(LinExpr::var(tvar));
  for (int l1 = 0; l1 < L; ++l1) {
    const VecC a1 = reg.A.col(l1);
    for (int l2 = 0; l2 <= l1; ++l2) {
      const VecC a2 = reg.A.col(l2);
      auto [er, ei] = W.sandwich(a1, a2);
      LinExpr re_m = prob.materialized(std::move(er));
      LinExpr re1 = re_m;
      re1.constant -= reg.Rad[device](l1, l2);
      soc.push_back(std::move(re1));
      if (l1 != l2) {
        LinExpr im_m = prob.materialized(std::move(ei));
        soc.push_back(im_m);
        LinExpr re2 = re_m;
        re2.constant -= reg.Rad[device](l2, l1);
        soc.push_back(std::move(re2));
        soc.push_back(-1.0 * im_m);
      }
    }
  }
  prob.add_soc(std::move(soc));
  prob.set_objective(LinExpr::var(tvar));
  SolveOptions opts;
  opts.tol_gap_abs = opts.tol_gap_rel = opts.tol_feas = 1e-8;
  auto res = prob.solve(opts);
  if (!res.ok()) {
    throw InfeasibleError("registration fit solve failed: " + to_string(res.status));
  }
  MatC Wv = W.value(res);
  // clip asymmetric / negative numerical residue
  Wv = 0.5 * (Wv + Wv.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<MatC> es(Wv);
  VecR ev = es.eigenvalues().cwiseMax(0.0);
  Wv = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  const double scale = diag_budget / std::max(Wv.diagonal().real().maxCoeff(), diag_budget);
  Wv *= scale;
  return {Wv, res.value(LinExpr::var(tvar))};
}

}  // namespace

RegistrationSpec build_registration(const ScenarioConfig& cfg, const Geometry& geom) {
  RegistrationSpec reg;
  const int K = cfg.K, M = cfg.M, L = cfg.reg_grid_size;
  reg.L = L;
  double ref_width = cfg.reg_beamwidth_ref_rad;
  if (ref_width <= 0.0) ref_width = 0.886 * 2.0 / cfg.N_c;
  reg.widths = adjust_beamwidths(geom, ref_width);

  const double d1 = cfg.reg_grid_pitch_spacing_rad;
  const double d2 = cfg.reg_grid_azimuth_spacing_rad;
  reg.theta_grid.resize(L);
  reg.phi_grid.resize(L);
  for (int l = 0; l < L; ++l) {
    reg.theta_grid(l) = reg.widths.theta0 + (l - (L - 1) / 2.0) * d1;
    reg.phi_grid(l) = reg.widths.phi0 + (l - (L - 1) / 2.0) * d2;
  }
  reg.A.resize(cfg.N_t(), L);
  for (int l = 0; l < L; ++l) {
    reg.A.col(l) = upa_steering(reg.theta_grid(l), reg.phi_grid(l), cfg.N_r, cfg.N_c);
  }
  reg.Rad.resize(K);
  for (int k = 0; k < K; ++k) {
    std::vector<std::pair<double, double>> lobes;
    for (int m = 0; m < M; ++m)
      lobes.push_back({geom.pitch_dev_tgt(k, m), geom.azim_dev_tgt(k, m)});
    lobes.push_back({geom.pitch_dev_ap(k), geom.azim_dev_ap(k)});
    // per-device mask width: median of the adjusted pair widths
    std::vector<double> wt(M), wp(M);
    for (int m = 0; m < M; ++m) {
      wt[m] = reg.widths.delta_theta(k, m);
      wp[m] = reg.widths.delta_phi(k, m);
    }
    std::nth_element(wt.begin(), wt.begin() + M / 2, wt.end());
    std::nth_element(wp.begin(), wp.begin() + M / 2, wp.end());
    reg.Rad[k] = desired_response(reg.theta_grid, reg.phi_grid, lobes, wt[M / 2], wp[M / 2]);
  }

  double fit_total = 0.0;
  for (int k = 0; k < K; ++k) {
    auto [Wfit, resid] = registration_fit(reg, cfg.N_t(), 0.7 * cfg.element_power_max_w, k);
    reg.fit_W.push_back(std::move(Wfit));
    fit_total += resid * resid;
  }
  reg.best_fit_residual = fit_total;
  reg.gamma_th = cfg.registration_error_max > 0.0 ? cfg.registration_error_max
                                                  : 1.15 * fit_total;
  return reg;
}

}  // namespace triscc
