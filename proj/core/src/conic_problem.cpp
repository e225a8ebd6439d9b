// SPDX-License-Identifier: Apache-2.0
#include "triscc/conic/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "clarabel_ffi.h"

#include <cstdlib>

namespace triscc::conic {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kNearOptimal: return "near-optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kFailure: return "failure";
  }
  return "failure";
}

void Problem::push_block(int kind, int dim, double alpha, std::vector<LinExpr> rows) {
  const int base = static_cast<int>(b_.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [col, coef] : rows[r].terms) {
      assert(col >= 0 && col < n_vars_);
      if (coef == 0.0) continue;
      row_of_.push_back(base + static_cast<int>(r));
      col_of_.push_back(col);
      val_of_.push_back(-coef);
    }
    b_.push_back(rows[r].constant);
  }
  cones_.push_back(Cone{kind, dim, alpha});
}

void Problem::add_eq(LinExpr e) {
  std::vector<LinExpr> rows;
  rows.push_back(std::move(e));
  push_block(TRISCC_CONE_ZERO, 1, 0.0, std::move(rows));
}

void Problem::add_le(LinExpr e) {
  // e <= 0  <=>  s = -e >= 0  <=>  row(-(-e)) ... with s = b - A x = -e
  std::vector<LinExpr> rows;
  rows.push_back(-std::move(e));
  push_block(TRISCC_CONE_NONNEG, 1, 0.0, std::move(rows));
}

void Problem::add_soc(std::vector<LinExpr> v) {
  const int dim = static_cast<int>(v.size());
  push_block(TRISCC_CONE_SOC, dim, 0.0, std::move(v));
}

void Problem::add_psd_lower(int n, std::vector<LinExpr> lower) {
  assert(static_cast<int>(lower.size()) == n * (n + 1) / 2);
  const double sqrt2 = std::sqrt(2.0);
  // Clarabel svec: upper triangle stacked columnwise, off-diagonals x sqrt(2).
  std::vector<LinExpr> rows;
  rows.reserve(lower.size());
  auto lower_pos = [n](int i, int j) {  // i >= j
    return j * n - j * (j - 1) / 2 + (i - j);
  };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      LinExpr e = lower[lower_pos(j, i)];  // X(i,j) = X(j,i), j >= i
      if (i != j) e *= sqrt2;
      rows.push_back(std::move(e));
    }
  }
  push_block(TRISCC_CONE_PSD_TRIANGLE, n, 0.0, std::move(rows));
}

void Problem::add_exp(LinExpr x, LinExpr y, LinExpr z) {
  std::vector<LinExpr> rows;
  rows.push_back(std::move(x));
  rows.push_back(std::move(y));
  rows.push_back(std::move(z));
  push_block(TRISCC_CONE_EXP, 3, 0.0, std::move(rows));
}

void Problem::add_pow3(LinExpr x, LinExpr y, LinExpr z, double alpha) {
  std::vector<LinExpr> rows;
  rows.push_back(std::move(x));
  rows.push_back(std::move(y));
  rows.push_back(std::move(z));
  push_block(TRISCC_CONE_POW3, 3, alpha, std::move(rows));
}

SolveResult Problem::solve(const SolveOptions& opts) const {
  SolveResult res;
  const int n = n_vars_;
  const auto m = static_cast<std::int64_t>(b_.size());

  std::vector<double> q(n, 0.0);
  for (const auto& [i, c] : objective_.terms) q[i] += c;

  // triplets -> CSC
  const std::size_t nnz = val_of_.size();
  std::vector<std::int64_t> colptr(n + 1, 0);
  for (std::size_t t = 0; t < nnz; ++t) colptr[col_of_[t] + 1]++;
  for (int c = 0; c < n; ++c) colptr[c + 1] += colptr[c];
  std::vector<std::int64_t> rowidx(nnz);
  std::vector<double> vals(nnz);
  {
    std::vector<std::int64_t> next(colptr.begin(), colptr.end() - 1);
    for (std::size_t t = 0; t < nnz; ++t) {
      auto p = next[col_of_[t]]++;
      rowidx[p] = row_of_[t];
      vals[p] = val_of_[t];
    }
    // sort rows within each column and merge duplicates
    std::vector<std::int64_t> cp2(n + 1, 0);
    std::vector<std::int64_t> ri2;
    std::vector<double> v2;
    ri2.reserve(nnz);
    v2.reserve(nnz);
    for (int c = 0; c < n; ++c) {
      const auto beg = colptr[c], end = colptr[c + 1];
      std::vector<std::pair<std::int64_t, double>> col;
      col.reserve(end - beg);
      for (auto p = beg; p < end; ++p) col.emplace_back(rowidx[p], vals[p]);
      std::sort(col.begin(), col.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t i = 0; i < col.size(); ++i) {
        if (!ri2.empty() && ri2.size() > static_cast<std::size_t>(cp2[c]) &&
            ri2.back() == col[i].first) {
          v2.back() += col[i].second;
        } else {
          ri2.push_back(col[i].first);
          v2.push_back(col[i].second);
        }
      }
      cp2[c + 1] = static_cast<std::int64_t>(ri2.size());
    }
    colptr = std::move(cp2);
    rowidx = std::move(ri2);
    vals = std::move(v2);
  }

  std::vector<triscc_cone_spec> cones(cones_.size());
  for (std::size_t i = 0; i < cones_.size(); ++i) {
    cones[i].kind = cones_[i].kind;
    cones[i].dim = cones_[i].dim;
    cones[i].alpha = cones_[i].alpha;
  }

  triscc_solver_opts fo{};
  fo.tol_gap_abs = opts.tol_gap_abs;
  fo.tol_gap_rel = opts.tol_gap_rel;
  fo.tol_feas = opts.tol_feas;
  fo.max_iter = opts.max_iter;
  fo.verbose = opts.verbose ? 1 : 0;
  fo.time_limit = opts.time_limit_s;
  fo.equilibrate = 1;
  fo.static_reg = opts.static_reg;
  fo.use_faer = opts.use_faer ? 1 : 0;

  res.x.resize(n);
  res.x.setZero();
  double obj = 0.0;
  std::int32_t status = 10, iters = 0;
  double solve_time = 0.0;
  const std::int32_t rc = triscc_clarabel_solve(
      n, m, q.data(), colptr.data(), rowidx.data(), vals.data(), b_.data(),
      cones.data(), static_cast<std::int64_t>(cones.size()), &fo, res.x.data(),
      &obj, &status, &iters, &solve_time);
  res.objective = obj;
  res.iterations = iters;
  res.solve_time_s = solve_time;
  if (std::getenv("TRISCC_SOLVER_DEBUG")) {
    std::fprintf(stderr, "[conic] n=%d m=%lld nnz=%zu iters=%d time=%.3fs status=%d\n", n,
                 static_cast<long long>(m), vals.size(), iters, solve_time, status);
  }
  if (rc != 0) {
    res.status = SolveStatus::kFailure;
    res.diagnostic = "solver interface error " + std::to_string(rc);
    return res;
  }
  switch (status) {
    case 0: res.status = SolveStatus::kOptimal; break;
    case 1: res.status = SolveStatus::kNearOptimal; break;
    case 2:
    case 4: res.status = SolveStatus::kInfeasible; break;
    case 3:
    case 5: res.status = SolveStatus::kUnbounded; break;
    default:
      res.status = SolveStatus::kFailure;
      res.diagnostic = "solver status code " + std::to_string(status);
      break;
  }
  return res;
}

void Problem::dump(std::ostream& os) const {
  os << "conic-problem vars=" << n_vars_ << " rows=" << b_.size() << "\n";
  os << "objective:";
  for (const auto& [i, c] : objective_.terms) os << ' ' << i << ':' << c;
  os << " const=" << objective_.constant << "\n";
  os << "cones:";
  for (const auto& c : cones_) os << " (" << c.kind << "," << c.dim << "," << c.alpha << ")";
  os << "\n";
  for (std::size_t t = 0; t < val_of_.size(); ++t)
    os << row_of_[t] << ' ' << col_of_[t] << ' ' << val_of_[t] << '\n';
  os << "b:";
  for (double v : b_) os << ' ' << v;
  os << "\n";
}

}  // namespace triscc::conic
