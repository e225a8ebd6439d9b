// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "triscc/conic/hermitian.hpp"
#include "triscc/conic/problem.hpp"

using namespace triscc;
using namespace triscc::conic;

TEST_CASE("trivial LP: min x s.t. x >= 1") {
  Problem p;
  const int x = p.add_var();
  p.add_ge(LinExpr::var(x) - 1.0);
  p.set_objective(LinExpr::var(x));
  auto res = p.solve();
  REQUIRE(res.ok());
  CHECK(res.x(x) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("tiny SDP: min tr X s.t. X >= I gives n") {
  for (int n : {2, 4}) {
    Problem p;
    HermitianVar X(p, n);
    // X - I >= 0 as a real symmetric PSD block on the embedding of X - I
    HermExpr E(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto [er, ei] = X.sandwich(VecC::Unit(n, i), VecC::Unit(n, j));
        E.re(i, j) = er;
        E.im(i, j) = ei;
      }
    E.add_constant(-MatC::Identity(n, n));
    // reuse the embedding helper through logdet? no: direct PSD push
    const int n2 = 2 * n;
    std::vector<LinExpr> lower(n2 * (n2 + 1) / 2);
    auto pos = [n2](int i, int j) { return j * n2 - j * (j - 1) / 2 + (i - j); };
    for (int j = 0; j < n2; ++j)
      for (int i = j; i < n2; ++i) {
        if (i < n && j < n) lower[pos(i, j)] = E.re(i, j);
        else if (i >= n && j >= n) lower[pos(i, j)] = E.re(i - n, j - n);
        else lower[pos(i, j)] = E.im(i - n, j);
      }
    p.add_psd_lower(n2, std::move(lower));
    p.set_objective(X.trace());
    auto res = p.solve();
    REQUIRE(res.ok());
    CHECK(res.objective == doctest::Approx(n).epsilon(1e-6));
  }
}

TEST_CASE("PSD triangle packing: min tr X s.t. X >= M recovers M (3x3, distinct entries)") {
  MatR M(3, 3);
  M << 4.0, 0.7, -0.3,
       0.7, 3.0, 0.5,
      -0.3, 0.5, 2.0;
  Problem p;
  // real symmetric variable via 6 dofs
  auto v = p.add_vars(6);
  auto lp = [&](int i, int j) {  // lower col-major position
    return j * 3 - j * (j - 1) / 2 + (i - j);
  };
  std::vector<LinExpr> lower(6);
  for (int j = 0; j < 3; ++j)
    for (int i = j; i < 3; ++i)
      lower[lp(i, j)] = LinExpr::var(v[lp(i, j)]) - M(i, j);
  p.add_psd_lower(3, std::move(lower));
  LinExpr tr = LinExpr::var(v[lp(0, 0)]) + LinExpr::var(v[lp(1, 1)]) + LinExpr::var(v[lp(2, 2)]);
  p.set_objective(tr);
  auto res = p.solve();
  REQUIRE(res.ok());
  for (int j = 0; j < 3; ++j)
    for (int i = j; i < 3; ++i)
      CHECK(res.x(v[lp(i, j)]) == doctest::Approx(M(i, j)).epsilon(5e-6));
}

TEST_CASE("exponential cone: e^1 and power cone: x^3/y^2") {
  Problem p;
  const int z = p.add_var();
  p.add_exp(LinExpr(1.0), LinExpr(1.0), LinExpr::var(z));
  p.set_objective(LinExpr::var(z));
  auto res = p.solve();
  REQUIRE(res.ok());
  CHECK(res.x(z) == doctest::Approx(std::exp(1.0)).epsilon(1e-6));

  Problem q;
  LinExpr s = cubic_over_square_epigraph(q, LinExpr(2.0), LinExpr(1.0));
  q.set_objective(s);
  auto res2 = q.solve();
  REQUIRE(res2.ok());
  CHECK(res2.value(s) == doctest::Approx(8.0).epsilon(1e-7));

  // x = 0 -> minimum 0; y scaling: y x2 at fixed x -> s / 4
  Problem q2;
  LinExpr s2 = cubic_over_square_epigraph(q2, LinExpr(2.0), LinExpr(2.0));
  q2.set_objective(s2);
  auto res3 = q2.solve();
  REQUIRE(res3.ok());
  CHECK(res3.value(s2) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("hermitian embedding: round trip and eigenvalue doubling") {
  std::mt19937 gen(7);
  std::normal_distribution<double> nd;
  const int n = 5;
  MatC A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cxd(nd(gen), nd(gen));
  MatC H = A * A.adjoint();  // Hermitian PSD

  MatR E = embed_hermitian(H);
  CHECK((extract_hermitian(E) - H).norm() == 0.0);  // exact round trip
  CHECK(E.trace() == doctest::Approx(2.0 * H.trace().real()).epsilon(1e-12));

  Eigen::SelfAdjointEigenSolver<MatC> eh(H);
  Eigen::SelfAdjointEigenSolver<MatR> ee(E);
  // each H-eigenvalue appears twice
  for (int i = 0; i < n; ++i) {
    CHECK(ee.eigenvalues()(2 * i) == doctest::Approx(eh.eigenvalues()(i)).epsilon(1e-9));
    CHECK(ee.eigenvalues()(2 * i + 1) == doctest::Approx(eh.eigenvalues()(i)).epsilon(1e-9));
  }

  // identity embeds to identity
  CHECK((embed_hermitian(MatC::Identity(3, 3)) - MatR::Identity(6, 6)).norm() == 0.0);
}

TEST_CASE("hermitian var: quad form, sandwich, congruence match dense algebra") {
  std::mt19937 gen(3);
  std::normal_distribution<double> nd;
  const int n = 4;
  Problem p;
  HermitianVar W(p, n);
  // fix W = H0 via equality rows, then evaluate expressions
  MatC B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = cxd(nd(gen), nd(gen));
  MatC H0 = B * B.adjoint();
  for (int i = 0; i < n; ++i) p.add_eq(W.diag_entry(i) - H0(i, i).real());
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) {
      p.add_eq(LinExpr::var(W.dof_re(i, j)) - H0(i, j).real());
      p.add_eq(LinExpr::var(W.dof_im(i, j)) - H0(i, j).imag());
    }
  p.set_objective(LinExpr(0.0));
  auto res = p.solve();
  REQUIRE(res.ok());
  CHECK((W.value(res) - H0).norm() < 1e-7);

  VecC a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a(i) = cxd(nd(gen), nd(gen));
    b(i) = cxd(nd(gen), nd(gen));
  }
  const double qf_oracle = (a.adjoint() * H0 * a)(0, 0).real();
  CHECK(res.value(W.quad_form(a)) == doctest::Approx(qf_oracle).epsilon(1e-7));

  auto [sr, si] = W.sandwich(a, b);
  const cxd sw_oracle = (a.adjoint() * H0 * b)(0, 0);
  CHECK(res.value(sr) == doctest::Approx(sw_oracle.real()).epsilon(1e-7));
  CHECK(res.value(si) == doctest::Approx(sw_oracle.imag()).epsilon(1e-7));

  MatC Hm(2, n);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < n; ++j) Hm(i, j) = cxd(nd(gen), nd(gen));
  HermExpr C = W.congruence(Hm);
  const MatC C_oracle = Hm * H0 * Hm.adjoint();
  CHECK((C.value(res) - C_oracle).norm() < 1e-6);

  MatC Msym = B + B.adjoint();
  CHECK(res.value(W.trace_product(Msym)) ==
        doctest::Approx((Msym * H0).trace().real()).epsilon(1e-7));
}

TEST_CASE("logdet hypograph: tightness against dense logdet, n <= 8") {
  std::mt19937 gen(11);
  std::normal_distribution<double> nd;
  for (int n : {2, 3, 8}) {
    MatC B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = cxd(nd(gen), nd(gen));
    MatC X = B * B.adjoint() + 0.5 * MatC::Identity(n, n);

    Problem p;
    HermExpr Xe(n);
    Xe.add_constant(X);
    LinExpr t = logdet_hypograph(p, Xe);
    p.set_objective(-t);  // maximize t
    auto res = p.solve();
    REQUIRE(res.ok());
    Eigen::SelfAdjointEigenSolver<MatC> es(X);
    const double ld = es.eigenvalues().array().log().sum();
    CHECK(res.value(t) == doctest::Approx(ld).epsilon(1e-6));
  }

  // fixed diagonal case: X = diag(2,3) -> max t = ln 6
  Problem p;
  HermExpr Xe(2);
  Xe.add_constant((MatC(2, 2) << cxd(2, 0), cxd(0, 0), cxd(0, 0), cxd(3, 0)).finished());
  LinExpr t = logdet_hypograph(p, Xe);
  p.set_objective(-t);
  auto res = p.solve();
  REQUIRE(res.ok());
  CHECK(res.value(t) == doctest::Approx(std::log(6.0)).epsilon(1e-7));
}

TEST_CASE("two-variable feasibility agrees with a grid oracle") {
  // min x + y  s.t.  (x-1)^2-ish region via SOC: ||(x,y)|| <= 2, x + y >= 1
  Problem p;
  const int x = p.add_var(), y = p.add_var();
  p.add_soc({LinExpr(2.0), LinExpr::var(x), LinExpr::var(y)});
  p.add_ge(LinExpr::var(x) + LinExpr::var(y) - 1.0);
  p.set_objective(LinExpr::var(x) + LinExpr::var(y));
  auto res = p.solve();
  REQUIRE(res.ok());

  double best = 1e300;
  for (double gx = -2; gx <= 2; gx += 1e-3)
    for (double gy = -2; gy <= 2; gy += 1e-3) {
      if (gx * gx + gy * gy <= 4.0 && gx + gy >= 1.0) best = std::min(best, gx + gy);
    }
  CHECK(res.objective == doctest::Approx(best).epsilon(1e-3));

  // infeasible instance reports infeasible
  Problem q;
  const int z = q.add_var();
  q.add_ge(LinExpr::var(z) - 2.0);
  q.add_le(LinExpr::var(z) - 1.0);
  q.set_objective(LinExpr::var(z));
  auto r2 = q.solve();
  CHECK(r2.status == SolveStatus::kInfeasible);
}
