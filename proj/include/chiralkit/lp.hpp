#pragma once

#include "chiralkit/base.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace chiralkit {

// ---------------------------------------------------------------------------
// Dense two-phase simplex, Bland's rule throughout.
//
// Problems here are tiny (a handful of rows over R^4), so a textbook tableau
// is plenty. Bland's pivoting makes the iteration deterministic and cycle
// free; hitting the iteration cap is therefore reported as a hard error
// rather than silently accepted.
// ---------------------------------------------------------------------------
namespace simplex_detail {

enum class SolveStatus { Optimal, Infeasible, Unbounded };

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
};

inline constexpr double kPivotTol = 1e-11;
inline constexpr int kMaxIterations = 20000;

class Tableau {
 public:
  // min c^T x  s.t.  A x = b, x >= 0.   b is made nonnegative by row negation.
  Tableau(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::VectorXd c)
      : rows_(static_cast<int>(a.rows())),
        structural_(static_cast<int>(a.cols())),
        cost_(std::move(c)) {
    for (int i = 0; i < rows_; ++i) {
      if (b[i] < 0.0) {
        a.row(i) = -a.row(i);
        b[i] = -b[i];
      }
    }
    // Layout: [A | I_artificial | b]
    body_.resize(rows_, structural_ + rows_ + 1);
    body_.leftCols(structural_) = a;
    body_.block(0, structural_, rows_, rows_) =
        Eigen::MatrixXd::Identity(rows_, rows_);
    body_.col(structural_ + rows_) = b;
    basis_.resize(rows_);
    for (int i = 0; i < rows_; ++i) basis_[i] = structural_ + i;
  }

  Solution solve() {
    // Phase 1: drive the artificials to zero.
    Eigen::VectorXd phase1_cost =
        Eigen::VectorXd::Zero(structural_ + rows_);
    phase1_cost.tail(rows_).setOnes();
    if (!iterate(phase1_cost, structural_ + rows_))
      throw NumericalFailure("simplex stalled in phase 1");
    if (objective(phase1_cost) > 1e-7) return {SolveStatus::Infeasible, {}, 0.0};
    purge_artificials();

    // Phase 2 on the structural columns only.
    Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(structural_ + rows_);
    phase2_cost.head(structural_) = cost_;
    if (!iterate(phase2_cost, structural_))
      return {SolveStatus::Unbounded, {}, 0.0};

    Solution out;
    out.status = SolveStatus::Optimal;
    out.x = Eigen::VectorXd::Zero(structural_);
    for (int i = 0; i < rows_; ++i)
      if (basis_[i] < structural_) out.x[basis_[i]] = rhs(i);
    out.value = cost_.dot(out.x);
    return out;
  }

 private:
  double rhs(int row) const { return body_(row, structural_ + rows_); }

  double objective(const Eigen::VectorXd& cost) const {
    double v = 0.0;
    for (int i = 0; i < rows_; ++i) v += cost[basis_[i]] * rhs(i);
    return v;
  }

  // Reduced cost of column j under `cost` for the current basis.
  double reduced_cost(const Eigen::VectorXd& cost, int j) const {
    double z = 0.0;
    for (int i = 0; i < rows_; ++i) z += cost[basis_[i]] * body_(i, j);
    return cost[j] - z;
  }

  void pivot(int row, int col) {
    body_.row(row) /= body_(row, col);
    for (int i = 0; i < rows_; ++i) {
      if (i == row) continue;
      const double f = body_(i, col);
      if (f != 0.0) body_.row(i) -= f * body_.row(row);
    }
    basis_[row] = col;
  }

  // Runs Bland iterations over columns [0, ncols). Returns false on cap.
  bool iterate(const Eigen::VectorXd& cost, int ncols) {
    for (int iter = 0; iter < kMaxIterations; ++iter) {
      int entering = -1;
      for (int j = 0; j < ncols; ++j) {
        if (is_basic(j)) continue;
        if (reduced_cost(cost, j) < -kPivotTol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;

      int leaving = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < rows_; ++i) {
        const double a = body_(i, entering);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(i) / a;
        if (leaving < 0 || ratio < best_ratio - kPivotTol ||
            (std::abs(ratio - best_ratio) <= kPivotTol &&
             basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving < 0) return false;  // unbounded (phase 2 only)
      pivot(leaving, entering);
    }
    throw NumericalFailure("simplex iteration cap reached");
  }

  bool is_basic(int col) const {
    for (int i = 0; i < rows_; ++i)
      if (basis_[i] == col) return true;
    return false;
  }

  // Pivot leftover zero-level artificials out of the basis; rows that cannot
  // be pivoted are redundant equalities and are zeroed out.
  void purge_artificials() {
    for (int i = 0; i < rows_; ++i) {
      if (basis_[i] < structural_) continue;
      int col = -1;
      for (int j = 0; j < structural_; ++j) {
        if (std::abs(body_(i, j)) > kPivotTol && !is_basic(j)) {
          col = j;
          break;
        }
      }
      if (col >= 0) pivot(i, col);
      // else: redundant row; keep the artificial basic at level ~0.
    }
  }

  int rows_;
  int structural_;
  Eigen::VectorXd cost_;
  Eigen::MatrixXd body_;
  std::vector<int> basis_;
};

inline Solution solve_standard_form(const Eigen::MatrixXd& a,
                                    const Eigen::VectorXd& b,
                                    const Eigen::VectorXd& c) {
  return Tableau(a, b, c).solve();
}

}  // namespace simplex_detail

// ---------------------------------------------------------------------------
// Feasibility problems over R^4
// ---------------------------------------------------------------------------

enum class FeasibilityStatus { StrictlyFeasible, WeaklyFeasible, Infeasible };

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::Infeasible;
  std::optional<Vec4> witness;
  std::optional<double> eps;
};

// The program  max { eps : E y = 0, eps <= 1, w_j^T y >= eps, u_l^T y >= 0 }
// with the witness confined to the box |y_i| <= 1. Rows are normalized to
// unit max-norm at construction, so the optimal eps is a scale-free margin
// and "optimal value positive" is the strict-feasibility criterion.
class FeasibilityProblem {
 public:
  FeasibilityProblem(std::vector<Vec4> eq_rows, std::vector<Vec4> strict_rows,
                     std::vector<Vec4> weak_rows)
      : eq_(std::move(eq_rows)),
        strict_(std::move(strict_rows)),
        weak_(std::move(weak_rows)) {
    if (eq_.empty() && strict_.empty() && weak_.empty())
      throw std::invalid_argument("feasibility problem has no rows");
    normalize(eq_);
    normalize(strict_);
    normalize(weak_);
  }

  const std::vector<Vec4>& eq_rows() const { return eq_; }
  const std::vector<Vec4>& strict_rows() const { return strict_; }
  const std::vector<Vec4>& weak_rows() const { return weak_; }

 private:
  static void normalize(std::vector<Vec4>& rows) {
    for (auto& r : rows) {
      const double m = r.lpNorm<Eigen::Infinity>();
      if (!(m > 0.0))
        throw std::invalid_argument("zero row in feasibility problem");
      r /= m;
    }
  }

  std::vector<Vec4> eq_;
  std::vector<Vec4> strict_;
  std::vector<Vec4> weak_;
};

namespace lp_detail {

// Builds and solves the box-constrained program. `objective` selects what is
// maximized: the margin variable eps, or the sum of strict-row values (used
// to separate WeaklyFeasible from Infeasible once eps* = 0).
enum class Goal { MaxMargin, MaxStrictSum };

struct BoxSolve {
  bool solved = false;
  Vec4 y = Vec4::Zero();
  double value = 0.0;
};

inline BoxSolve solve_box_program(const FeasibilityProblem& p, Goal goal) {
  const auto& eq = p.eq_rows();
  const auto& st = p.strict_rows();
  const auto& wk = p.weak_rows();
  const int ne = static_cast<int>(eq.size());
  const int ns = static_cast<int>(st.size());
  const int nw = static_cast<int>(wk.size());

  // Substitution x = y + 1 keeps all variables nonnegative; the box rows
  // x_i <= 2 bound the witness.
  const bool use_eps = goal == Goal::MaxMargin;
  const int nvar = 4 + (use_eps ? 1 : 0);
  const int nrows = ne + ns + nw + 4 + (use_eps ? 1 : 0);
  const int nslack = ns + nw + 4 + (use_eps ? 1 : 0);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nrows, nvar + nslack);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nrows);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nvar + nslack);

  int row = 0;
  int slack = nvar;
  for (int i = 0; i < ne; ++i, ++row) {
    a.row(row).head<4>() = eq[i];
    b[row] = eq[i].sum();
  }
  for (int j = 0; j < ns; ++j, ++row) {
    a.row(row).head<4>() = st[j];
    if (use_eps) a(row, 4) = -1.0;
    a(row, slack++) = -1.0;
    b[row] = st[j].sum();
  }
  for (int l = 0; l < nw; ++l, ++row) {
    a.row(row).head<4>() = wk[l];
    a(row, slack++) = -1.0;
    b[row] = wk[l].sum();
  }
  for (int i = 0; i < 4; ++i, ++row) {
    a(row, i) = 1.0;
    a(row, slack++) = 1.0;
    b[row] = 2.0;
  }
  if (use_eps) {
    a(row, 4) = 1.0;
    a(row, slack++) = 1.0;
    b[row] = 1.0;
    ++row;
    c[4] = -1.0;  // maximize eps
  } else {
    for (int j = 0; j < ns; ++j) c.head<4>() -= st[j];  // maximize sum w_j^T y
  }

  const auto sol = simplex_detail::solve_standard_form(a, b, c);
  BoxSolve out;
  if (sol.status != simplex_detail::SolveStatus::Optimal) return out;
  out.solved = true;
  out.y = sol.x.head<4>() - Vec4::Ones();
  out.value = -sol.value;
  if (!use_eps) {
    double base = 0.0;
    for (const auto& w : p.strict_rows()) base += w.sum();
    out.value -= base;
  }
  return out;
}

}  // namespace lp_detail

// Decides strict feasibility by the max-eps program; when the optimum is
// zero, a second solve separates "some nonzero y touches the strict rows"
// (WeaklyFeasible) from "every admissible y annihilates them" (Infeasible).
// A StrictlyFeasible witness is re-verified against all rows.
inline FeasibilityResult solve_feasibility(const FeasibilityProblem& p,
                                           double tol = kDefaultTol) {
  FeasibilityResult result;
  const auto margin = lp_detail::solve_box_program(p, lp_detail::Goal::MaxMargin);
  if (!margin.solved)
    throw NumericalFailure("margin program did not reach an optimum");

  if (margin.value > tol) {
    for (const auto& e : p.eq_rows())
      if (std::abs(e.dot(margin.y)) > 1e-7)
        throw NumericalFailure("witness violates an equality row");
    for (const auto& w : p.strict_rows())
      if (w.dot(margin.y) < margin.value * (1.0 - 1e-6))
        throw NumericalFailure("witness violates a strict row");
    for (const auto& u : p.weak_rows())
      if (u.dot(margin.y) < -1e-9)
        throw NumericalFailure("witness violates a weak row");
    result.status = FeasibilityStatus::StrictlyFeasible;
    result.witness = margin.y;
    result.eps = margin.value;
    return result;
  }

  const auto sum = lp_detail::solve_box_program(p, lp_detail::Goal::MaxStrictSum);
  if (sum.solved && sum.value > tol) {
    result.status = FeasibilityStatus::WeaklyFeasible;
    result.witness = sum.y;
    return result;
  }
  result.status = FeasibilityStatus::Infeasible;
  return result;
}

// ---------------------------------------------------------------------------
// Polyhedral cones in R^4, given by finite generator lists
// ---------------------------------------------------------------------------

// An empty generator list is the cone {0}.
struct ConeGenerators {
  std::vector<Vec4> generators;

  ConeGenerators() = default;
  explicit ConeGenerators(std::vector<Vec4> g) : generators(std::move(g)) {
    for (const auto& v : generators)
      if (!(v.lpNorm<Eigen::Infinity>() > 0.0))
        throw std::invalid_argument("cone generator must be nonzero");
  }
};

// y in K*  iff  y^T g >= 0 for every generator, within the sign band.
inline bool dual_member(const ConeGenerators& cone, const Vec4& y,
                        double tol = kDefaultTol) {
  const double ny = y.lpNorm<Eigen::Infinity>();
  for (const auto& g : cone.generators) {
    if (y.dot(g) < -tol * ny * g.lpNorm<Eigen::Infinity>()) return false;
  }
  return true;
}

// y in int K*  iff  y^T g > 0 strictly on every generator. Only meaningful
// when K* is full-dimensional (K pointed); for non-pointed cones callers must
// go through solve_feasibility with the lineality space as equality rows.
inline bool dual_interior_member(const ConeGenerators& cone, const Vec4& y,
                                 double tol = kDefaultTol) {
  const double ny = y.norm();
  for (const auto& g : cone.generators) {
    if (y.dot(g) <= tol * ny * g.norm()) return false;
  }
  return true;
}

// Primal membership x in cone(g_1..g_l), solved as an LP feasibility (phase 1
// on  G lambda = x, lambda >= 0). Used by the oracle cross-checks and the
// biduality tests.
inline bool cone_member(const ConeGenerators& cone, const Vec4& x,
                        double tol = kDefaultTol) {
  const double nx = x.lpNorm<Eigen::Infinity>();
  if (!(nx > 0.0)) return true;  // the origin is in every cone
  if (cone.generators.empty()) return false;

  const int l = static_cast<int>(cone.generators.size());
  Eigen::MatrixXd a(4, l);
  for (int j = 0; j < l; ++j)
    a.col(j) = cone.generators[j] / cone.generators[j].lpNorm<Eigen::Infinity>();
  Eigen::VectorXd b = x / nx;
  // Phase-1 only: any feasible point has objective zero.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(l);
  simplex_detail::Tableau t(a, b, c);
  const auto sol = t.solve();
  (void)tol;
  return sol.status == simplex_detail::SolveStatus::Optimal;
}

// Whether the row space of the 4 x k matrix with the given columns meets the
// strictly positive orthant of R^k. Strict feasibility of the max-eps program
// with every column as a strict row; the non-strict outcomes collapse to
// Infeasible because only the strict system matters here.
inline FeasibilityResult rowspace_meets_positive_orthant(
    const std::vector<Vec4>& columns, double tol = kDefaultTol) {
  FeasibilityProblem p({}, columns, {});
  FeasibilityResult r = solve_feasibility(p, tol);
  if (r.status != FeasibilityStatus::StrictlyFeasible) {
    r.status = FeasibilityStatus::Infeasible;
    r.witness.reset();
    r.eps.reset();
  }
  return r;
}

}  // namespace chiralkit
