// SPDX-License-Identifier: Apache-2.0
#include "triscc/conic/hermitian.hpp"

#include <cmath>

namespace triscc::conic {

MatR embed_hermitian(const MatC& H) {
  const int n = static_cast<int>(H.rows());
  MatR E(2 * n, 2 * n);
  E.topLeftCorner(n, n) = H.real();
  E.bottomRightCorner(n, n) = H.real();
  E.topRightCorner(n, n) = -H.imag();
  E.bottomLeftCorner(n, n) = H.imag();
  return E;
}

MatC extract_hermitian(const MatR& E) {
  const int n = static_cast<int>(E.rows()) / 2;
  MatR re = 0.5 * (E.topLeftCorner(n, n) + E.bottomRightCorner(n, n));
  MatR im = 0.5 * (E.bottomLeftCorner(n, n) - E.topRightCorner(n, n));
  MatC H(n, n);
  H.real() = re;
  H.imag() = im;
  return H;
}

void HermExpr::add_constant(const MatC& M) {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      re(i, j).constant += M(i, j).real();
      im(i, j).constant += M(i, j).imag();
    }
}

MatC HermExpr::value(const SolveResult& r) const {
  MatC M(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      M(i, j) = cxd(r.value(re(i, j)), r.value(im(i, j)));
  return M;
}

HermitianVar::HermitianVar(Problem& p, int n) : n_(n) {
  diag_ = p.add_vars(n);
  const int offs = n * (n - 1) / 2;
  re_ = p.add_vars(offs);
  im_ = p.add_vars(offs);
}

LinExpr HermitianVar::quad_form(const VecC& a) const {
  LinExpr e;
  for (int i = 0; i < n_; ++i) e += LinExpr::var(diag_[i], std::norm(a(i)));
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      // pair (i < j), dofs stored at (j, i)
      const cxd x = std::conj(a(i)) * a(j);
      e += LinExpr::var(re_[tri(j, i)], 2.0 * x.real());
      e += LinExpr::var(im_[tri(j, i)], 2.0 * x.imag());
    }
  }
  return e;
}

std::pair<LinExpr, LinExpr> HermitianVar::sandwich(const VecC& a, const VecC& b) const {
  LinExpr er, ei;
  for (int i = 0; i < n_; ++i) {
    const cxd c = std::conj(a(i)) * b(i);
    er += LinExpr::var(diag_[i], c.real());
    ei += LinExpr::var(diag_[i], c.imag());
  }
  for (int j = 0; j < n_; ++j) {
    for (int i = j + 1; i < n_; ++i) {
      // W(i,j) = re + j im (i > j), W(j,i) its conjugate
      const cxd u = std::conj(a(i)) * b(j) + std::conj(a(j)) * b(i);
      const cxd v = cxd(0, 1) * (std::conj(a(i)) * b(j) - std::conj(a(j)) * b(i));
      const int t = tri(i, j);
      er += LinExpr::var(re_[t], u.real());
      ei += LinExpr::var(re_[t], u.imag());
      er += LinExpr::var(im_[t], v.real());
      ei += LinExpr::var(im_[t], v.imag());
    }
  }
  return {er, ei};
}

LinExpr HermitianVar::trace_product(const MatC& M) const {
  LinExpr e;
  for (int i = 0; i < n_; ++i) e += LinExpr::var(diag_[i], M(i, i).real());
  for (int j = 0; j < n_; ++j) {
    for (int i = j + 1; i < n_; ++i) {
      // tr(MW) term: M(j,i) W(i,j) + M(i,j) W(j,i)
      const cxd s = M(j, i) + M(i, j);
      const cxd d = cxd(0, 1) * (M(j, i) - M(i, j));
      const int t = tri(i, j);
      e += LinExpr::var(re_[t], s.real());
      e += LinExpr::var(im_[t], d.real());
    }
  }
  return e;
}

LinExpr HermitianVar::trace() const {
  LinExpr e;
  for (int i = 0; i < n_; ++i) e += LinExpr::var(diag_[i]);
  return e;
}

HermExpr HermitianVar::congruence(const MatC& H) const {
  const int m = static_cast<int>(H.rows());
  HermExpr out(m);
  for (int r = 0; r < m; ++r) {
    const VecC ar = H.row(r).conjugate();
    for (int c = r; c < m; ++c) {
      const VecC bc = H.row(c).conjugate();
      auto [er, ei] = sandwich(ar, bc);
      out.re(r, c) = er;
      out.im(r, c) = ei;
      if (c != r) {
        out.re(c, r) = er;
        out.im(c, r) = -ei;
      }
    }
  }
  return out;
}

void HermitianVar::add_psd(Problem& p) const {
  const int n2 = 2 * n_;
  std::vector<LinExpr> lower(n2 * (n2 + 1) / 2);
  auto pos = [n2](int i, int j) {  // i >= j, column-major lower
    return j * n2 - j * (j - 1) / 2 + (i - j);
  };
  auto re_entry = [&](int i, int j) -> LinExpr {  // i >= j in the X block
    if (i == j) return LinExpr::var(diag_[i]);
    return LinExpr::var(re_[tri(i, j)]);
  };
  auto im_entry = [&](int i, int j) -> LinExpr {  // Y(i,j), any i, j
    if (i == j) return LinExpr(0.0);
    if (i > j) return LinExpr::var(im_[tri(i, j)]);
    return LinExpr::var(im_[tri(j, i)], -1.0);
  };
  for (int j = 0; j < n2; ++j) {
    for (int i = j; i < n2; ++i) {
      LinExpr e;
      if (i < n_ && j < n_) {
        e = re_entry(i, j);
      } else if (i >= n_ && j >= n_) {
        e = re_entry(i - n_, j - n_);
      } else {
        // block (1,0): Y(i - n, j)
        e = im_entry(i - n_, j);
      }
      lower[pos(i, j)] = std::move(e);
    }
  }
  p.add_psd_lower(n2, std::move(lower));
}

MatC HermitianVar::value(const SolveResult& r) const {
  MatC W(n_, n_);
  for (int i = 0; i < n_; ++i) W(i, i) = r.x(diag_[i]);
  for (int j = 0; j < n_; ++j)
    for (int i = j + 1; i < n_; ++i) {
      const cxd v(r.x(re_[tri(i, j)]), r.x(im_[tri(i, j)]));
      W(i, j) = v;
      W(j, i) = std::conj(v);
    }
  return W;
}

LinExpr logdet_hypograph_sym(Problem& p, int n, const std::vector<LinExpr>& sym_lower) {
  // [[X, Z], [Z', diag(Z)]] >= 0 with Z lower triangular gives
  // det X >= prod diag(Z); per-diagonal exp cones give t_d <= log Z_dd.
  const int nz = n * (n + 1) / 2;
  std::vector<int> zvars = p.add_vars(nz);
  auto zpos = [n](int i, int j) { return j * n - j * (j - 1) / 2 + (i - j); };

  const int n2 = 2 * n;
  std::vector<LinExpr> lower(n2 * (n2 + 1) / 2);
  auto pos = [n2](int i, int j) { return j * n2 - j * (j - 1) / 2 + (i - j); };
  auto lpos = [n](int i, int j) { return j * n - j * (j - 1) / 2 + (i - j); };
  for (int j = 0; j < n2; ++j) {
    for (int i = j; i < n2; ++i) {
      LinExpr e;
      if (i < n && j < n) {
        e = sym_lower[lpos(i, j)];
      } else if (i >= n && j < n) {
        // (Z')(i-n, j) = Z(j, i-n): nonzero when j >= i-n
        const int zi = j, zj = i - n;
        if (zi >= zj) e = LinExpr::var(zvars[zpos(zi, zj)]);
      } else {
        if (i == j) e = LinExpr::var(zvars[zpos(i - n, i - n)]);
      }
      lower[pos(i, j)] = std::move(e);
    }
  }
  p.add_psd_lower(n2, std::move(lower));

  LinExpr t;
  for (int d = 0; d < n; ++d) {
    const int td = p.add_var();
    // y e^{x/y} <= z with y = 1: e^{t_d} <= Z_dd
    p.add_exp(LinExpr::var(td), LinExpr(1.0), LinExpr::var(zvars[zpos(d, d)]));
    t += LinExpr::var(td);
  }
  return t;
}

LinExpr logdet_hypograph(Problem& p, const HermExpr& X) {
  const int n = X.size();
  const int n2 = 2 * n;
  // The real part appears in two embedding blocks; materialize dense entries
  // once so the PSD rows stay sparse.
  HermExpr Xm(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const LinExpr& re = X.re(i, j);
      Xm.re(i, j) = re.terms.size() > 8 ? p.materialized(re) : re;
      if (i != j) Xm.re(j, i) = Xm.re(i, j);
      const LinExpr& im = X.im(i, j);
      if (i != j) {
        Xm.im(i, j) = im.terms.size() > 8 ? p.materialized(im) : im;
        Xm.im(j, i) = -1.0 * Xm.im(i, j);
      }
    }
  std::vector<LinExpr> lower(n2 * (n2 + 1) / 2);
  auto pos = [n2](int i, int j) { return j * n2 - j * (j - 1) / 2 + (i - j); };
  for (int j = 0; j < n2; ++j) {
    for (int i = j; i < n2; ++i) {
      LinExpr e;
      if (i < n && j < n) e = Xm.re(i, j);
      else if (i >= n && j >= n) e = Xm.re(i - n, j - n);
      else e = Xm.im(i - n, j);  // embedding block (1,0) = Im X
      lower[pos(i, j)] = std::move(e);
    }
  }
  LinExpr t = logdet_hypograph_sym(p, n2, lower);
  t *= 0.5;  // embedding doubles the log-det
  return t;
}

LinExpr cubic_over_square_epigraph(Problem& p, const LinExpr& x, const LinExpr& y) {
  const int s = p.add_var();
  p.add_pow3(LinExpr::var(s), y, x, 1.0 / 3.0);
  return LinExpr::var(s);
}

}  // namespace triscc::conic
