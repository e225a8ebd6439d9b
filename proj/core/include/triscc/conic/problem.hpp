// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cassert>
#include <string>
#include <vector>

#include "triscc/types.hpp"

namespace triscc::conic {

/// Sparse affine expression a'x + c over problem variables.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  /*implicit*/ LinExpr(double c) : constant(c) {}
  static LinExpr var(int index, double coef = 1.0) {
    LinExpr e;
    e.terms.emplace_back(index, coef);
    return e;
  }

  LinExpr& operator+=(const LinExpr& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    constant += o.constant;
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) {
    for (const auto& [i, c] : o.terms) terms.emplace_back(i, -c);
    constant -= o.constant;
    return *this;
  }
  LinExpr& operator*=(double s) {
    for (auto& [i, c] : terms) c *= s;
    constant *= s;
    return *this;
  }
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }
  friend LinExpr operator-(LinExpr a) { return a *= -1.0; }
};

enum class SolveStatus { kOptimal, kNearOptimal, kInfeasible, kUnbounded, kFailure };

std::string to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::kFailure;
  VecR x;
  double objective = 0.0;
  int iterations = 0;
  double solve_time_s = 0.0;
  std::string diagnostic;

  bool ok() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kNearOptimal;
  }
  double value(const LinExpr& e) const {
    double v = e.constant;
    for (const auto& [i, c] : e.terms) v += c * x(i);
    return v;
  }
};

struct SolveOptions {
  double tol_gap_abs = 1e-9;
  double tol_gap_rel = 1e-9;
  double tol_feas = 1e-9;
  int max_iter = 200;
  bool verbose = false;
  double time_limit_s = 0.0;
  double static_reg = 1e-8;
  bool use_faer = true;
};

/// Conic problem in solver-agnostic form:
///   minimize q'x   s.t.   rows(x) in K,
/// with K a product of zero/nonneg/second-order/PSD-triangle/exp/power cones.
/// Rows are affine expressions; the backend translates to A x + s = b.
class Problem {
 public:
  int add_var() { return n_vars_++; }
  std::vector<int> add_vars(int n) {
    std::vector<int> idx(n);
    for (auto& i : idx) i = add_var();
    return idx;
  }
  int num_vars() const { return n_vars_; }

  void set_objective(LinExpr e) { objective_ = std::move(e); }
  void add_objective_term(const LinExpr& e) { objective_ += e; }
  const LinExpr& objective() const { return objective_; }

  void add_eq(LinExpr e);                       ///< e == 0
  /// Replace a (typically dense, reused) expression by a fresh variable tied
  /// to it with one equality row.
  LinExpr materialized(LinExpr e) {
    const int v = add_var();
    e -= LinExpr::var(v);
    add_eq(std::move(e));
    return LinExpr::var(v);
  }
  void add_le(LinExpr e);                       ///< e <= 0
  void add_ge(LinExpr e) { add_le(-std::move(e)); }
  /// ||v[1..]||_2 <= v[0]
  void add_soc(std::vector<LinExpr> v);
  /// X (symmetric, given as lower triangle column-major: X(0,0), X(1,0), ...,
  /// X(n-1,0), X(1,1), ...) is positive semidefinite.
  void add_psd_lower(int n, std::vector<LinExpr> lower);
  /// y e^{x/y} <= z, y > 0
  void add_exp(LinExpr x, LinExpr y, LinExpr z);
  /// x^alpha y^(1-alpha) >= |z|, x, y >= 0
  void add_pow3(LinExpr x, LinExpr y, LinExpr z, double alpha);

  SolveResult solve(const SolveOptions& opts = {}) const;

  /// Documented text form for solver-bug reports.
  void dump(std::ostream& os) const;

  // Introspection used by tests.
  int num_rows() const { return static_cast<int>(b_.size()); }

 private:
  struct Cone {
    int kind;      // matches the FFI constants
    int dim;       // rows for zero/nonneg/soc, matrix side for psd
    double alpha;  // pow3 only
  };
  // Push `rows` as one cone block; each row contributes  -a'x + s = c.
  void push_block(int kind, int dim, double alpha, std::vector<LinExpr> rows);

  int n_vars_ = 0;
  LinExpr objective_;
  std::vector<Cone> cones_;
  // triplet storage, rows appended in cone order
  std::vector<int> row_of_, col_of_;
  std::vector<double> val_of_;
  std::vector<double> b_;
};

}  // namespace triscc::conic
