// Copyright 2020 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//
//  Dense two-phase simplex with Bland's rule, and zero-sum matrix games
//  solved through it. Sized for desk-scale problems (a few thousand
//  columns, a handful of rows).
//

#ifndef ARO_LP_HPP
#define ARO_LP_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aro/errors.hpp"

namespace aro {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct LinearConstraint {
  std::vector<double> coeffs;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

/// maximize objective . x  subject to constraints and lower <= x <= upper.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<LinearConstraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;

  int num_vars() const { return static_cast<int>(objective.size()); }

  int add_variable(double cost, double lo = 0.0, double hi = kInf) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    return num_vars() - 1;
  }

  void add_constraint(std::vector<double> coeffs, Relation rel, double rhs) {
    coeffs.resize(objective.size(), 0.0);
    constraints.push_back({std::move(coeffs), rel, rhs});
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "?";
}

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  std::vector<double> x;
  /// One multiplier per constraint: >= 0 for <= rows, <= 0 for >= rows.
  /// At optimality objective - A^T duals is <= 0 on variables at their
  /// lower bound.
  std::vector<double> duals;
  int iterations = 0;
};

struct SimplexOptions {
  double pivot_tol = 1e-9;
  double optimality_tol = 1e-9;
  double feasibility_tol = 1e-7;
  int max_iterations = 1'000'000;
};

namespace detail {

class Tableau {
 public:
  Tableau(int rows, int cols)
      : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

  double& at(int r, int c) { return data_[r * (cols_ + 1) + c]; }
  double at(int r, int c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  double rhs(int r) const { return at(r, cols_); }
  /// Objective row holds reduced costs; its rhs is the objective value.
  double& cost(int c) { return at(rows_, c); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void pivot(int pr, int pc) {
    const int width = cols_ + 1;
    double* prow = &data_[pr * width];
    const double inv = 1.0 / prow[pc];
    for (int c = 0; c < width; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (int r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double* row = &data_[r * width];
      const double factor = row[pc];
      if (factor == 0.0) continue;
      for (int c = 0; c < width; ++c) row[c] -= factor * prow[c];
      row[pc] = 0.0;
    }
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> data_;
};

}  // namespace detail

/// Two-phase primal simplex with Bland's anti-cycling rule.
inline LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& opt = {}) {
  const int nv = lp.num_vars();
  if (static_cast<int>(lp.lower.size()) != nv ||
      static_cast<int>(lp.upper.size()) != nv) {
    throw SolverError("solve_lp: bounds do not match variable count");
  }
  for (const auto& c : lp.constraints) {
    if (static_cast<int>(c.coeffs.size()) != nv) {
      throw SolverError("solve_lp: constraint width does not match variables");
    }
    for (double a : c.coeffs) {
      if (!std::isfinite(a)) throw SolverError("solve_lp: non-finite coefficient");
    }
    if (!std::isfinite(c.rhs)) throw SolverError("solve_lp: non-finite rhs");
  }

  // Map each original variable to nonnegative columns:
  // x_j = shift_j + sum over its columns of sign * column.
  struct ColRef {
    int var;
    double sign;
  };
  std::vector<ColRef> structural;
  std::vector<double> shift(nv, 0.0);
  struct BoundRow {
    int col;
    double cap;
  };
  std::vector<BoundRow> bound_rows;
  for (int j = 0; j < nv; ++j) {
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    if (lo > hi) {
      LpResult r;
      r.status = LpStatus::kInfeasible;
      return r;
    }
    if (std::isfinite(lo)) {
      shift[j] = lo;
      structural.push_back({j, 1.0});
      if (std::isfinite(hi)) {
        bound_rows.push_back({static_cast<int>(structural.size()) - 1, hi - lo});
      }
    } else if (std::isfinite(hi)) {
      shift[j] = hi;
      structural.push_back({j, -1.0});
    } else {
      structural.push_back({j, 1.0});
      structural.push_back({j, -1.0});
    }
  }
  const int ns = static_cast<int>(structural.size());
  const int n_orig_rows = static_cast<int>(lp.constraints.size());
  const int rows = n_orig_rows + static_cast<int>(bound_rows.size());

  // Row data in terms of structural columns, rhs adjusted by the shifts.
  std::vector<std::vector<double>> a(rows, std::vector<double>(ns, 0.0));
  std::vector<double> b(rows, 0.0);
  std::vector<Relation> rel(rows, Relation::kLessEqual);
  for (int i = 0; i < n_orig_rows; ++i) {
    const auto& c = lp.constraints[i];
    double rhs = c.rhs;
    for (int j = 0; j < nv; ++j) rhs -= c.coeffs[j] * shift[j];
    for (int k = 0; k < ns; ++k) {
      a[i][k] = c.coeffs[structural[k].var] * structural[k].sign;
    }
    b[i] = rhs;
    rel[i] = c.relation;
  }
  for (std::size_t t = 0; t < bound_rows.size(); ++t) {
    const int i = n_orig_rows + static_cast<int>(t);
    a[i][bound_rows[t].col] = 1.0;
    b[i] = bound_rows[t].cap;
  }
  std::vector<double> row_sign(rows, 1.0);
  for (int i = 0; i < rows; ++i) {
    if (b[i] < 0.0) {
      row_sign[i] = -1.0;
      b[i] = -b[i];
      for (double& v : a[i]) v = -v;
      if (rel[i] == Relation::kLessEqual) {
        rel[i] = Relation::kGreaterEqual;
      } else if (rel[i] == Relation::kGreaterEqual) {
        rel[i] = Relation::kLessEqual;
      }
    }
  }

  // Column layout: structural | slack/surplus | artificial.
  int next = ns;
  std::vector<int> slack_col(rows, -1);
  for (int i = 0; i < rows; ++i) {
    if (rel[i] != Relation::kEqual) slack_col[i] = next++;
  }
  const int first_artificial = next;
  std::vector<int> identity_col(rows, -1);
  for (int i = 0; i < rows; ++i) {
    identity_col[i] = rel[i] == Relation::kLessEqual ? slack_col[i] : next++;
  }
  const int cols = next;

  detail::Tableau t(rows, cols);
  std::vector<int> basis(rows);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < ns; ++k) t.at(i, k) = a[i][k];
    if (slack_col[i] >= 0) {
      t.at(i, slack_col[i]) = rel[i] == Relation::kLessEqual ? 1.0 : -1.0;
    }
    t.at(i, identity_col[i]) = 1.0;
    t.rhs(i) = b[i];
    basis[i] = identity_col[i];
  }

  LpResult result;
  const auto is_artificial = [&](int c) { return c >= first_artificial; };

  // Reduced costs d_j = c_B B^-1 A_j - c_j for cost vector `c`.
  const auto load_costs = [&](const std::vector<double>& c) {
    for (int col = 0; col <= cols; ++col) {
      double d = col < cols ? -c[col] : 0.0;
      for (int i = 0; i < rows; ++i) {
        const double cb = c[basis[i]];
        if (cb != 0.0) d += cb * (col < cols ? t.at(i, col) : t.rhs(i));
      }
      t.cost(col) = d;
    }
  };

  // Returns false when unbounded.
  const auto iterate = [&](bool allow_artificial) -> bool {
    while (true) {
      if (++result.iterations > opt.max_iterations) {
        throw SolverError("solve_lp: iteration limit reached");
      }
      int enter = -1;
      for (int col = 0; col < cols; ++col) {
        if (!allow_artificial && is_artificial(col)) continue;
        if (t.cost(col) < -opt.optimality_tol) {
          enter = col;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = kInf;
      for (int i = 0; i < rows; ++i) {
        const double coef = t.at(i, enter);
        if (coef <= opt.pivot_tol) continue;
        const double ratio = t.rhs(i) / coef;
        if (ratio < best_ratio - 1e-12 ||
            (leave >= 0 && std::abs(ratio - best_ratio) <= 1e-12 &&
             basis[i] < basis[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      t.pivot(leave, enter);
      basis[leave] = enter;
    }
  };

  // Phase 1: drive artificials to zero.
  if (first_artificial < cols) {
    std::vector<double> c1(cols, 0.0);
    for (int col = first_artificial; col < cols; ++col) c1[col] = -1.0;
    load_costs(c1);
    iterate(true);
    double scale = 1.0;
    for (int i = 0; i < rows; ++i) scale = std::max(scale, std::abs(b[i]));
    if (t.cost(cols) < -opt.feasibility_tol * scale) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    // Pivot remaining zero-valued artificials out where possible.
    for (int i = 0; i < rows; ++i) {
      if (!is_artificial(basis[i])) continue;
      for (int col = 0; col < first_artificial; ++col) {
        if (std::abs(t.at(i, col)) > opt.pivot_tol) {
          t.pivot(i, col);
          basis[i] = col;
          break;
        }
      }
    }
  }

  // Phase 2.
  std::vector<double> c2(cols, 0.0);
  for (int k = 0; k < ns; ++k) {
    c2[k] = lp.objective[structural[k].var] * structural[k].sign;
  }
  load_costs(c2);
  if (!iterate(false)) {
    result.status = LpStatus::kUnbounded;
    return result;
  }

  std::vector<double> col_value(cols, 0.0);
  for (int i = 0; i < rows; ++i) col_value[basis[i]] = t.rhs(i);
  result.x = shift;
  for (int k = 0; k < ns; ++k) {
    result.x[structural[k].var] += structural[k].sign * col_value[k];
  }
  result.value = 0.0;
  for (int j = 0; j < nv; ++j) result.value += lp.objective[j] * result.x[j];
  result.duals.resize(n_orig_rows);
  for (int i = 0; i < n_orig_rows; ++i) {
    result.duals[i] = row_sign[i] * t.cost(identity_col[i]);
  }
  result.status = LpStatus::kOptimal;
  return result;
}

/// Row player maximizes; rows are pure strategies of the maximizer.
struct MatrixGame {
  std::vector<std::vector<double>> payoff;

  int rows() const { return static_cast<int>(payoff.size()); }
  int cols() const { return payoff.empty() ? 0 : static_cast<int>(payoff[0].size()); }
};

struct GameSolution {
  double value = 0.0;
  std::vector<double> row_mix;
  std::vector<double> col_mix;
};

namespace detail {

inline void clean_mix(std::vector<double>& p) {
  double total = 0.0;
  for (double& v : p) {
    if (v < 0.0) v = 0.0;
    total += v;
  }
  if (total > 0.0) {
    for (double& v : p) v /= total;
  }
}

}  // namespace detail

/// Solves max over row mixes of min over columns by the standard LP
/// reduction; the column mix is read off the LP duals. With
/// `sub_probability` the row mix may sum to less than one (zero payoff for
/// the missing mass).
inline GameSolution solve_matrix_game(const MatrixGame& game,
                                      bool sub_probability = false) {
  const int r = game.rows();
  const int c = game.cols();
  if (r == 0 || c == 0) throw SolverError("solve_matrix_game: empty payoff matrix");
  for (const auto& row : game.payoff) {
    if (static_cast<int>(row.size()) != c) {
      throw SolverError("solve_matrix_game: ragged payoff matrix");
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw SolverError("solve_matrix_game: non-finite payoff");
    }
  }
  LinearProgram lp;
  for (int i = 0; i < r; ++i) lp.add_variable(0.0);
  const int v = lp.add_variable(1.0, -kInf, kInf);
  for (int j = 0; j < c; ++j) {
    std::vector<double> coeffs(r + 1, 0.0);
    for (int i = 0; i < r; ++i) coeffs[i] = -game.payoff[i][j];
    coeffs[v] = 1.0;
    lp.add_constraint(std::move(coeffs), Relation::kLessEqual, 0.0);
  }
  std::vector<double> ones(r + 1, 1.0);
  ones[v] = 0.0;
  lp.add_constraint(std::move(ones),
                    sub_probability ? Relation::kLessEqual : Relation::kEqual, 1.0);
  const LpResult res = solve_lp(lp);
  if (res.status != LpStatus::kOptimal) {
    throw SolverError(std::string("solve_matrix_game: LP ") + to_string(res.status));
  }
  GameSolution out;
  out.value = res.value;
  out.row_mix.assign(res.x.begin(), res.x.begin() + r);
  for (double& p : out.row_mix) p = std::max(0.0, p);
  if (!sub_probability) detail::clean_mix(out.row_mix);
  out.col_mix.assign(res.duals.begin(), res.duals.begin() + c);
  detail::clean_mix(out.col_mix);
  return out;
}

}  // namespace aro

#endif  // ARO_LP_HPP
