// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>

#include "triscc/conic/hermitian.hpp"
#include "triscc/optimizer.hpp"

namespace triscc {

using conic::HermExpr;
using conic::HermitianVar;
using conic::LinExpr;
using conic::Problem;
using conic::SolveOptions;
using conic::SolveResult;

namespace {

struct EigenParts {
  MatC vectors;  // descending eigenvalue order
  VecR values;
};

EigenParts eig_desc(const MatC& W) {
  Eigen::SelfAdjointEigenSolver<MatC> es(W);
  EigenParts p;
  const int n = static_cast<int>(W.rows());
  p.vectors.resize(n, n);
  p.values.resize(n);
  for (int i = 0; i < n; ++i) {
    p.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
    p.values(i) = es.eigenvalues()(n - 1 - i);
  }
  return p;
}

double rel_rank_excess(const MatC& Wc, int G) {
  const int n = static_cast<int>(Wc.rows());
  if (G >= n) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatC> es(Wc, Eigen::EigenvaluesOnly);
  const double tr = std::max(Wc.trace().real(), 1e-300);
  return es.eigenvalues()(n - 1 - G) / tr;
}

// Decision variables of one device in one slot. The communication covariance
// lives in a fixed column basis (top-G eigenvectors when pinned, the rotated
// full eigenbasis on the IRM path); the sensing covariance is in the natural
// basis.
struct DevVars {
  MatC basis_c;  // N_t x (G or N_t), orthonormal columns
  std::unique_ptr<HermitianVar> c;
  std::unique_ptr<HermitianVar> s;
  int e_var = -1;

  LinExpr quad_total(const VecC& z_row) const {
    VecC wc = basis_c.transpose() * z_row;
    return c->quad_form(wc.conjugate()) + s->quad_form(z_row.conjugate());
  }
  HermExpr congruence_total(const MatC& H) const {
    HermExpr coexp = c->congruence(H * basis_c);
    HermExpr sexp = s->congruence(H);
    HermExpr out(coexp.size());
    for (int i = 0; i < out.size(); ++i)
      for (int j = 0; j < out.size(); ++j) {
        out.re(i, j) = coexp.re(i, j) + sexp.re(i, j);
        out.im(i, j) = coexp.im(i, j) + sexp.im(i, j);
      }
    return out;
  }
  LinExpr diag_total(int n) const {
    VecC row = basis_c.row(n).conjugate().transpose();
    return c->quad_form(row) + s->diag_entry(n);
  }
  LinExpr trace_total() const { return c->trace() + s->trace(); }
  LinExpr trace_product_c(const MatC& M) const {
    return c->trace_product(basis_c.adjoint() * M * basis_c);
  }
  LinExpr trace_product_s(const MatC& M) const { return s->trace_product(M); }
};

void add_psd_expr(Problem& p, const HermExpr& X) {
  const int n = X.size();
  const int n2 = 2 * n;
  std::vector<LinExpr> lower(n2 * (n2 + 1) / 2);
  auto pos = [n2](int i, int j) { return j * n2 - j * (j - 1) / 2 + (i - j); };
  for (int j = 0; j < n2; ++j)
    for (int i = j; i < n2; ++i) {
      if (i < n && j < n) lower[pos(i, j)] = X.re(i, j);
      else if (i >= n && j >= n) lower[pos(i, j)] = X.re(i - n, j - n);
      else lower[pos(i, j)] = X.im(i - n, j);
    }
  p.add_psd_lower(n2, std::move(lower));
}

struct SlotSolveOutcome {
  std::vector<MatC> Wc, Ws;
  bool ok = false;
  std::string status;
  int solves = 0;
};

// One SDP over the slot's covariances at a fixed SCA expansion point.
// `pinned[k]` selects the rank-G subspace form for device k; otherwise the
// full covariance in the rotated eigenbasis with the rank LMI at cap e_cap.
SlotSolveOutcome solve_slot_once(const ScenarioConfig& cfg, const ChannelSet& ch,
                                 const RegistrationSpec& reg, const BcdState& state,
                                 Slot slot, const std::vector<MatC>& Wc0,
                                 const std::vector<MatC>& Ws0,
                                 const std::vector<bool>& pinned,
                                 const VecR& e_cap, double penalty,
                                 const SolveOptions& sopts, int only_device) {
  const int K = cfg.K, N = cfg.N, N_t = cfg.N_t(), G = cfg.G, M = cfg.M;
  const double sigma = std::sqrt(cfg.noise_power_w);
  const bool trace_cap = cfg.baseline_mode == BaselineMode::kTct;

  Problem prob;
  std::vector<DevVars> dev(K);
  std::vector<bool> is_var(K, true);
  for (int k = 0; k < K; ++k) {
    if (only_device >= 0 && k != only_device) {
      is_var[k] = false;
      continue;
    }
    auto& d = dev[k];
    if (pinned[k]) {
      d.basis_c = eig_desc(Wc0[k]).vectors.leftCols(G);
      d.c = std::make_unique<HermitianVar>(prob, G);
    } else {
      d.basis_c = eig_desc(Wc0[k]).vectors;
      d.c = std::make_unique<HermitianVar>(prob, N_t);
      d.e_var = prob.add_var();
    }
    d.s = std::make_unique<HermitianVar>(prob, N_t);
    d.c->add_psd(prob);
    d.s->add_psd(prob);
    if (trace_cap) {
      prob.add_le(d.trace_total() - N_t * cfg.element_power_max_w);
    } else {
      for (int n = 0; n < N_t; ++n)
        prob.add_le(d.diag_total(n) - cfg.element_power_max_w);
    }
    if (!pinned[k]) {
      // e I - C[G:,G:] >= 0 in the rotated basis; e monotonically capped
      const int nb = N_t - G;
      if (nb > 0) {
        HermExpr lmi(nb);
        for (int i = 0; i < nb; ++i) {
          for (int j = 0; j < nb; ++j) {
            if (i == j) {
              lmi.re(i, i) = LinExpr::var(d.e_var) - d.c->diag_entry(G + i);
            } else {
              const int ii = G + std::max(i, j), jj = G + std::min(i, j);
              const double sgn_im = (i > j) ? -1.0 : 1.0;  // -C(i,j)
              lmi.re(i, j) = LinExpr::var(d.c->dof_re(ii, jj), -1.0);
              lmi.im(i, j) = LinExpr::var(d.c->dof_im(ii, jj),
                                          (i > j ? -1.0 : 1.0));
              (void)sgn_im;
            }
          }
        }
        add_psd_expr(prob, lmi);
      }
      prob.add_le(LinExpr::var(d.e_var) - e_cap(k));
      prob.add_ge(LinExpr::var(d.e_var));
    }
  }

  // fixed-device contributions (NC mode) enter as constants
  auto total0 = [&](int k) { return (Wc0[k] + Ws0[k]).eval(); };

  const double t_slot_sum = slot == kSlotI ? state.alloc.t1.sum() : state.alloc.t2.sum();
  (void)t_slot_sum;
  LinExpr objective;
  for (int k = 0; k < K; ++k) {
    if (!is_var[k]) continue;
    const double t_k = (slot == kSlotI ? state.alloc.t1(k) : state.alloc.t2(k));
    objective += std::max(t_k, 1e-6) * dev[k].trace_total();
    if (dev[k].e_var >= 0) objective += penalty * LinExpr::var(dev[k].e_var);
  }

  // total received covariance (noise-normalized): I + sum_i Ht_i W_i Ht_i^H
  std::vector<MatC> Ht(K);
  for (int i = 0; i < K; ++i) Ht[i] = ch.H[i] / sigma;
  HermExpr tot(N);
  tot.add_constant(MatC::Identity(N, N));
  for (int i = 0; i < K; ++i) {
    if (is_var[i]) {
      HermExpr c = dev[i].congruence_total(Ht[i]);
      for (int r = 0; r < N; ++r)
        for (int cix = 0; cix < N; ++cix) {
          tot.re(r, cix) += c.re(r, cix);
          tot.im(r, cix) += c.im(r, cix);
        }
    } else {
      tot.add_constant(Ht[i] * total0(i) * Ht[i].adjoint());
    }
  }
  LinExpr t_logdet = conic::logdet_hypograph(prob, tot);

  // SCA upper bound of ln det R_k at the expansion point
  const double ln2 = std::log(2.0);
  for (int k = 0; k < K; ++k) {
    if (only_device >= 0 && k != only_device) continue;
    MatC R0 = MatC::Identity(N, N);
    for (int i = 0; i < K; ++i) R0 += Ht[i] * total0(i) * Ht[i].adjoint();
    R0 -= Ht[k] * Wc0[k] * Ht[k].adjoint();
    Eigen::LLT<MatC> llt(R0);
    double ld0 = 0.0;
    for (int i = 0; i < N; ++i) ld0 += 2.0 * std::log(std::abs(llt.matrixL()(i, i)));
    const MatC Rinv = R0.inverse();
    LinExpr ub(ld0);
    for (int i = 0; i < K; ++i) {
      MatC Mi = Ht[i].adjoint() * Rinv * Ht[i];
      Mi = 0.5 * (Mi + Mi.adjoint()).eval();
      if (!is_var[i]) continue;  // fixed devices contribute zero difference
      if (i != k) {
        ub += dev[i].trace_product_c(Mi);
        ub.constant -= (Mi * Wc0[i]).trace().real();
      }
      ub += dev[i].trace_product_s(Mi);
      ub.constant -= (Mi * Ws0[i]).trace().real();
    }
    double rhs;
    if (slot == kSlotI) {
      rhs = cfg.rate_threshold_bpshz;
    } else {
      const double dr = state.alloc.dr(k);
      rhs = dr > 1.0 ? dr / (std::max(state.alloc.t2(k), 1e-9) * cfg.bandwidth_hz) : 0.0;
    }
    // (t - ub)/ln2 >= rhs
    LinExpr row = t_logdet - ub;
    row *= 1.0 / ln2;
    row.constant -= rhs;
    prob.add_ge(std::move(row));
  }

  if (slot == kSlotI) {
    // echo-SINR rows pinned at p: useful power equals p x (clutter + noise)
    const double pmd = cfg.matching_degree;
    for (int k = 0; k < K; ++k) {
      for (int m = 0; m < M; ++m) {
        if (state.sched.rho(k, m) < 0.5) continue;
        const double pkm = std::max(state.sched.p(k, m), 1e-12);
        LinExpr num, den;
        double num_const = 0.0, den_const = 0.0;
        for (int j = 0; j < M; ++j) {
          if (state.sched.rho(k, j) < 0.5) continue;
          for (int i = 0; i < K; ++i) {
            const VecC z = ch.z_at(k, j, i) / sigma;
            if (is_var[i]) {
              if (j == m) num += dev[i].quad_total(z);
              else den += dev[i].quad_total(z);
            } else {
              const double v = (z.transpose() * total0(i) * z.conjugate())(0, 0).real();
              if (j == m) num_const += v;
              else den_const += v;
            }
          }
        }
        num.constant += num_const;
        den.constant += den_const;
        // pmd*num == p*(den + (1-pmd)*num + 1), normalized by p
        LinExpr row = (pmd / pkm) * num - den - (1.0 - pmd) * num;
        row.constant -= 1.0;
        prob.add_eq(std::move(row));
      }
    }
  } else {
    // registration: || A^H W_k^II A - Rad_k ||_F summed over (free) devices
    std::vector<LinExpr> soc;
    double budget = reg.gamma_th;
    double fixed_part = 0.0;
    if (only_device >= 0) {
      budget = reg.gamma_th / K;  // per-device share in the stand-alone mode
    }
    soc.push_back(LinExpr(std::sqrt(std::max(budget - fixed_part, 0.0))));
    for (int k = 0; k < K; ++k) {
      if (!is_var[k]) continue;
      HermExpr gram = dev[k].congruence_total(reg.A.adjoint());
      // materialize each independent Gram entry once (dense maps shared by
      // the (l1,l2) and (l2,l1) residual rows)
      for (int l1 = 0; l1 < reg.L; ++l1)
        for (int l2 = 0; l2 <= l1; ++l2) {
          gram.re(l1, l2) = prob.materialized(gram.re(l1, l2));
          gram.re(l2, l1) = gram.re(l1, l2);
          if (l1 != l2) {
            gram.im(l1, l2) = prob.materialized(gram.im(l1, l2));
            gram.im(l2, l1) = -1.0 * gram.im(l1, l2);
          }
        }
      for (int l1 = 0; l1 < reg.L; ++l1)
        for (int l2 = 0; l2 < reg.L; ++l2) {
          LinExpr re = gram.re(l1, l2);
          re.constant -= reg.Rad[k](l1, l2);
          soc.push_back(std::move(re));
          if (l1 != l2) soc.push_back(gram.im(l1, l2));
        }
    }
    prob.add_soc(std::move(soc));
  }

  prob.set_objective(objective);
  SolveResult res = prob.solve(sopts);

  SlotSolveOutcome out;
  out.solves = 1;
  out.status = to_string(res.status);
  if (!res.ok()) return out;
  out.ok = true;
  out.Wc.resize(K);
  out.Ws.resize(K);
  for (int k = 0; k < K; ++k) {
    if (!is_var[k]) {
      out.Wc[k] = Wc0[k];
      out.Ws[k] = Ws0[k];
      continue;
    }
    MatC Xc = dev[k].c->value(res);
    out.Wc[k] = dev[k].basis_c * Xc * dev[k].basis_c.adjoint();
    out.Ws[k] = dev[k].s->value(res);
    // clip numerical PSD residue
    for (MatC* W : {&out.Wc[k], &out.Ws[k]}) {
      *W = 0.5 * (*W + W->adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<MatC> es(*W);
      VecR ev = es.eigenvalues().cwiseMax(0.0);
      *W = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    }
  }
  return out;
}

// Rank-controlled slot solve: IRM loop from higher-rank starts, pinned
// rank-G subspace solve at (and as) the e = 0 endpoint.
SlotSolveOutcome solve_slot(const ScenarioConfig& cfg, const ChannelSet& ch,
                            const RegistrationSpec& reg, const BcdState& state,
                            Slot slot, const BcdOptions& opts, int only_device) {
  const int K = cfg.K, G = cfg.G;
  std::vector<MatC> Wc = state.bf.Wc[slot];
  std::vector<MatC> Ws = state.bf.Ws[slot];

  VecR e_cap(K);
  bool need_irm = false;
  for (int k = 0; k < K; ++k) {
    e_cap(k) = std::max(rel_rank_excess(Wc[k], G) * std::max(Wc[k].trace().real(), 0.0), 0.0);
    if (rel_rank_excess(Wc[k], G) > opts.irm_tol) need_irm = true;
  }

  SlotSolveOutcome last;
  last.Wc = Wc;
  last.Ws = Ws;
  int total_solves = 0;

  if (need_irm) {
    std::vector<bool> unpinned(K, false);
    for (int it = 0; it < opts.irm_max_inner; ++it) {
      const double penalty = opts.irm_c0 * std::pow(opts.irm_growth, it);
      auto out = solve_slot_once(cfg, ch, reg, state, slot, Wc, Ws, unpinned, e_cap,
                                 penalty, opts.solver, only_device);
      total_solves += out.solves;
      if (!out.ok) {
        last.status = "irm:" + out.status;
        last.solves = total_solves;
        return last;
      }
      Wc = out.Wc;
      Ws = out.Ws;
      bool done = true;
      for (int k = 0; k < K; ++k) {
        const double rel = rel_rank_excess(Wc[k], G);
        e_cap(k) = std::min(e_cap(k), rel * std::max(Wc[k].trace().real(), 0.0));
        if (rel > opts.irm_tol) done = false;
      }
      if (done) break;
    }
  }

  // pinned polish at the exact rank-G endpoint
  std::vector<bool> pinned(K, true);
  auto out = solve_slot_once(cfg, ch, reg, state, slot, Wc, Ws, pinned, e_cap, 0.0,
                             opts.solver, only_device);
  total_solves += out.solves;
  if (out.ok) {
    out.solves = total_solves;
    return out;
  }
  last.ok = !need_irm ? false : true;  // IRM result is still usable if polish failed
  last.Wc = Wc;
  last.Ws = Ws;
  last.status = "polish:" + out.status;
  last.solves = total_solves;
  return last;
}

}  // namespace

BeamformerSet block2_beamforming(const ScenarioConfig& cfg, const ChannelSet& ch,
                                 const RegistrationSpec& reg, const BcdState& state,
                                 const BcdOptions& opts, std::string& status,
                                 int* solve_count) {
  BeamformerSet out = state.bf;
  status.clear();
  int solves = 0;
  const bool per_device = cfg.baseline_mode == BaselineMode::kNc;
  for (int s = 0; s < 2; ++s) {
    const Slot slot = static_cast<Slot>(s);
    if (per_device) {
      BcdState work = state;
      work.bf = out;
      for (int k = 0; k < cfg.K; ++k) {
        auto res = solve_slot(cfg, ch, reg, work, slot, opts, k);
        solves += res.solves;
        if (res.ok) {
          work.bf.Wc[slot] = res.Wc;
          work.bf.Ws[slot] = res.Ws;
        } else {
          status += (s == 0 ? "I" : "II") + std::string("/dev") + std::to_string(k) +
                    ":" + res.status + " ";
        }
      }
      out.Wc[slot] = work.bf.Wc[slot];
      out.Ws[slot] = work.bf.Ws[slot];
    } else {
      auto res = solve_slot(cfg, ch, reg, state, slot, opts, -1);
      solves += res.solves;
      if (res.ok) {
        out.Wc[slot] = res.Wc;
        out.Ws[slot] = res.Ws;
      } else {
        status += (s == 0 ? "I:" : "II:") + res.status + " ";
      }
    }
  }
  if (status.empty()) status = "ok";
  if (solve_count) *solve_count += solves;
  return out;
}

}  // namespace triscc
