// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "triscc/conic/problem.hpp"
#include "triscc/types.hpp"

namespace triscc::conic {

/// [[Re, -Im], [Im, Re]] real embedding; PSD of the embedding iff PSD of H,
/// trace and log-det double.
MatR embed_hermitian(const MatC& H);
/// Inverse of embed_hermitian (averages the paired blocks).
MatC extract_hermitian(const MatR& E);

/// n x n matrix of affine expressions with Hermitian symmetry, entry (i,j)
/// given by a real and an imaginary expression.
class HermExpr {
 public:
  explicit HermExpr(int n) : n_(n), re_(n * n), im_(n * n) {}
  int size() const { return n_; }
  LinExpr& re(int i, int j) { return re_[i * n_ + j]; }
  LinExpr& im(int i, int j) { return im_[i * n_ + j]; }
  const LinExpr& re(int i, int j) const { return re_[i * n_ + j]; }
  const LinExpr& im(int i, int j) const { return im_[i * n_ + j]; }

  void add_constant(const MatC& M);
  MatC value(const SolveResult& r) const;

 private:
  int n_;
  std::vector<LinExpr> re_, im_;
};

/// Hermitian n x n decision variable parametrized by n^2 real dofs
/// (diagonal, then lower-triangle real and imaginary parts).
class HermitianVar {
 public:
  HermitianVar(Problem& p, int n);

  int size() const { return n_; }
  int dof_diag(int i) const { return diag_[i]; }
  int dof_re(int i, int j) const { return re_[tri(i, j)]; }  // i > j
  int dof_im(int i, int j) const { return im_[tri(i, j)]; }  // i > j

  /// a^H W a (real by Hermitian symmetry).
  LinExpr quad_form(const VecC& a) const;
  /// a^H W b, returned as (real part, imaginary part).
  std::pair<LinExpr, LinExpr> sandwich(const VecC& a, const VecC& b) const;
  /// Re tr(M W); exact for Hermitian M.
  LinExpr trace_product(const MatC& M) const;
  LinExpr trace() const;
  LinExpr diag_entry(int i) const { return LinExpr::var(diag_[i]); }

  /// H W H^H as an affine Hermitian expression (H is m x n).
  HermExpr congruence(const MatC& H) const;

  /// W >= 0 via the PSD cone on the real embedding.
  void add_psd(Problem& p) const;

  MatC value(const SolveResult& r) const;

 private:
  int tri(int i, int j) const {  // i > j
    return j * n_ - j * (j + 1) / 2 + (i - j - 1);
  }
  int n_;
  std::vector<int> diag_, re_, im_;
};

/// Hypograph t <= logdet(X) for an affine real-symmetric X (natural log),
/// via the lower-triangular factor block and per-diagonal exponential cones.
/// `sym_lower` is the lower triangle of X column-major. Returns t.
LinExpr logdet_hypograph_sym(Problem& p, int n, const std::vector<LinExpr>& sym_lower);

/// Hypograph t <= logdet(X) for an affine Hermitian X: embeds to 2n x 2n,
/// halves the doubled log-det.
LinExpr logdet_hypograph(Problem& p, const HermExpr& X);

/// s >= x^3 / y^2 for x, y >= 0 via one 3-d power cone (s, y, x), exponents
/// (1/3, 2/3). Returns s.
LinExpr cubic_over_square_epigraph(Problem& p, const LinExpr& x, const LinExpr& y);

}  // namespace triscc::conic
