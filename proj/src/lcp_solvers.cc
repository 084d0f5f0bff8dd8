#include "tbsg/lcp_solvers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace tbsg {

std::string_view termination_name(IpmTermination t) {
  switch (t) {
    case IpmTermination::kConverged: return "converged";
    case IpmTermination::kMaxIterations: return "max_iters";
    case IpmTermination::kLineSearchStall: return "line_search_stall";
    case IpmTermination::kSingularDirection: return "singular_direction";
  }
  return "unknown";
}

namespace {

constexpr double kMinStep = 1e-14;
// A phase on a fixed shift t ends once w^T z <= kPhaseGapRatio * n * t.
constexpr double kPhaseGapRatio = 1.0;

double potential(double rho, const Vector& w, const Vector& z) {
  double sum_log = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) sum_log += std::log(w(i)) + std::log(z(i));
  return rho * std::log(w.dot(z)) - sum_log;
}

// Largest alpha with x + alpha dx >= 0 (infinity if dx >= 0).
double max_step(const Vector& x, const Vector& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (dx(i) < 0.0) alpha = std::min(alpha, -x(i) / dx(i));
  }
  return alpha;
}

bool strictly_positive(const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x(i) > 0.0)) return false;
  return true;
}

// Solves (Z M + W) dz = rhs.
std::optional<Vector> newton_solve(const Matrix& m, const Vector& w, const Vector& z, const Vector& rhs) {
  Matrix a = z.asDiagonal() * m;
  a.diagonal() += w;
  const LuDecomposition lu(a);
  if (lu.singular()) return std::nullopt;
  return lu.solve(rhs);
}

}  // namespace

IpmSolution solve_potential_reduction(const Lcp& lcp, const IpmOptions& options) {
  const Eigen::Index n = lcp.size();
  if (lcp.M.rows() != n || lcp.M.cols() != n) {
    throw std::invalid_argument("solve_potential_reduction: dimension mismatch");
  }
  const double nd = static_cast<double>(n);
  const double rho = options.rho.value_or(nd + std::sqrt(nd));
  if (!(options.epsilon > 0.0)) throw std::invalid_argument("IpmOptions: epsilon must be positive");
  if (!(rho > nd)) throw std::invalid_argument("IpmOptions: rho must exceed n");
  for (double f : {options.backtrack, options.step_fraction, options.homotopy_shrink}) {
    if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("IpmOptions: factors must lie in (0,1)");
  }

  IpmSolution sol;
  sol.rho = rho;
  if (n == 0) {
    sol.w = Vector(0);
    sol.z = Vector(0);
    return sol;
  }

  const Vector ones = Vector::Ones(n);
  Vector z = ones;
  Vector w = lcp.q + lcp.M * ones;
  double t = std::max(0.0, 1.0 - w.minCoeff());
  w.array() += t;
  const double t_final = options.epsilon * 1e-3;
  IpmTrace& trace = sol.trace;

  auto fail = [&](IpmTermination why, const std::string& msg) {
    trace.termination = why;
    throw IpmFailure("solve_potential_reduction: " + msg, trace);
  };

  bool force_centering = false;
  std::size_t steps = 0;
  for (;;) {
    const double gap = w.dot(z);
    const bool shifting = t > t_final;
    if (!shifting && gap < options.epsilon) break;
    if (steps >= options.max_iters) {
      fail(IpmTermination::kMaxIterations, "iteration cap of " + std::to_string(options.max_iters) + " exceeded");
    }
    ++steps;

    if (shifting && !force_centering && gap <= std::max(options.epsilon, kPhaseGapRatio * nd * t)) {
      // Newton step that shrinks the shift and the gap together, aiming at
      // the central point:  dw = dt 1 + M dz,  z o dw + w o dz = (s gap/n) 1 - w o z.
      const double dt = options.homotopy_shrink * t - t;
      const Vector target = Vector::Constant(n, options.homotopy_shrink * gap / nd) - w.cwiseProduct(z);
      const auto dz = newton_solve(lcp.M, w, z, Vector(target - dt * z));
      if (!dz) fail(IpmTermination::kSingularDirection, "singular homotopy system");
      const Vector dw = (lcp.M * *dz).array() + dt;
      const double limit = std::min(max_step(w, dw), max_step(z, *dz));
      const double alpha = std::min(1.0, options.step_fraction * limit);
      w += alpha * dw;
      z += alpha * *dz;
      t += alpha * dt;
      ++trace.homotopy_steps;
      force_centering = alpha < 1.0;
      continue;
    }
    force_centering = false;

    const Vector rhs = Vector::Constant(n, gap / rho) - w.cwiseProduct(z);
    const auto dz = newton_solve(lcp.M, w, z, rhs);
    if (!dz) fail(IpmTermination::kSingularDirection, "singular Newton system");
    const Vector dw = lcp.M * *dz;

    const double f0 = potential(rho, w, z);
    double alpha = options.step_fraction * std::min(max_step(w, dw), max_step(z, *dz));
    Vector w_new, z_new;
    double f1 = f0;
    for (;;) {
      if (alpha < kMinStep) fail(IpmTermination::kLineSearchStall, "line search stalled");
      w_new = w + alpha * dw;
      z_new = z + alpha * *dz;
      if (strictly_positive(w_new) && strictly_positive(z_new)) {
        f1 = potential(rho, w_new, z_new);
        if (f1 < f0) break;
      }
      alpha *= options.backtrack;
    }
    w = std::move(w_new);
    z = std::move(z_new);
    trace.records.push_back({steps, w.dot(z), f1, alpha, t, max_abs(dw - lcp.M * *dz)});
  }

  trace.termination = IpmTermination::kConverged;
  sol.w = std::move(w);
  sol.z = std::move(z);
  sol.shift = t;
  return sol;
}

void write_trace_csv(std::ostream& out, const IpmTrace& trace) {
  out << "iter,gap,potential,step,shift\n";
  const auto old = out.precision(17);
  for (const IpmIterate& r : trace.records) {
    out << r.iter << ',' << r.gap << ',' << r.potential << ',' << r.step << ',' << r.shift << '\n';
  }
  out.precision(old);
}

namespace {

// Lexicographic comparison of (rhs_i, B^{-1} row i) / d_i; true if row a < row b.
bool lex_less(const Matrix& tab, Eigen::Index rhs_col, Eigen::Index entering, Eigen::Index n, Eigen::Index a,
              Eigen::Index b) {
  const double da = tab(a, entering);
  const double db = tab(b, entering);
  auto key = [&](Eigen::Index row, Eigen::Index k, double d) {
    return (k == 0 ? tab(row, rhs_col) : tab(row, k - 1)) / d;
  };
  for (Eigen::Index k = 0; k <= n; ++k) {
    const double ka = key(a, k, da);
    const double kb = key(b, k, db);
    const double scale = std::max({1.0, std::abs(ka), std::abs(kb)});
    if (std::abs(ka - kb) > 1e-12 * scale) return ka < kb;
  }
  return a < b;
}

}  // namespace

PivotingSolution solve_pivoting(const Lcp& lcp, const PivotingOptions& options) {
  const Eigen::Index n = lcp.size();
  if (lcp.M.rows() != n || lcp.M.cols() != n) throw std::invalid_argument("solve_pivoting: dimension mismatch");

  PivotingSolution sol;
  sol.z_basic.assign(static_cast<std::size_t>(n), false);
  if (n == 0 || lcp.q.minCoeff() >= 0.0) {
    sol.w = lcp.q;
    sol.z = Vector::Zero(n);
    return sol;
  }

  // Columns: w_0..w_{n-1}, z_0..z_{n-1}, z0 (artificial), rhs.
  // Rows encode I w - M z - 1 z0 = q.
  const Eigen::Index z0_col = 2 * n;
  const Eigen::Index rhs_col = 2 * n + 1;
  Matrix tab = Matrix::Zero(n, 2 * n + 2);
  tab.block(0, 0, n, n) = Matrix::Identity(n, n);
  tab.block(0, n, n, n) = -lcp.M;
  tab.col(z0_col).setConstant(-1.0);
  tab.col(rhs_col) = lcp.q;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) basis[static_cast<std::size_t>(i)] = i;

  auto pivot = [&](Eigen::Index row, Eigen::Index col) {
    tab.row(row) /= tab(row, col);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != row && tab(i, col) != 0.0) tab.row(i) -= tab(i, col) * tab.row(row);
    }
    basis[static_cast<std::size_t>(row)] = col;
    ++sol.pivots;
  };

  // z0 enters at the most negative q_i. With B^{-1} = I the lexicographic
  // tie-break among equal q_i favors the highest row index.
  Eigen::Index leave = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (lcp.q(i) <= lcp.q(leave)) leave = i;
  }
  Eigen::Index leaving_var = basis[static_cast<std::size_t>(leave)];
  pivot(leave, z0_col);
  Eigen::Index entering = leaving_var < n ? leaving_var + n : leaving_var - n;

  for (;;) {
    if (sol.pivots > options.max_pivots) throw PivotingError("solve_pivoting: pivot cap exceeded");
    Eigen::Index best = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = tab(i, entering);
      if (d <= options.pivot_tol) continue;
      const double ratio = std::max(tab(i, rhs_col), 0.0) / d;
      const double scale = std::max(1.0, std::abs(best_ratio));
      if (best < 0 || ratio < best_ratio - 1e-12 * scale) {
        best = i;
        best_ratio = ratio;
      } else if (std::abs(ratio - best_ratio) <= 1e-12 * scale) {
        if (basis[static_cast<std::size_t>(i)] == z0_col ||
            (basis[static_cast<std::size_t>(best)] != z0_col && lex_less(tab, rhs_col, entering, n, i, best))) {
          best = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
    }
    if (best < 0) {
      throw PivotingError("solve_pivoting: ray termination (matrix is not a P-matrix or numerics failed)");
    }
    leaving_var = basis[static_cast<std::size_t>(best)];
    pivot(best, entering);
    if (leaving_var == z0_col) break;
    entering = leaving_var < n ? leaving_var + n : leaving_var - n;
  }

  // Recompute basic values from the original data: B x = q with columns
  // e_i for basic w_i and -M_{.j} for basic z_j.
  Matrix b(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index var = basis[static_cast<std::size_t>(k)];
    if (var < n) {
      b.col(k) = Vector::Unit(n, var);
    } else {
      b.col(k) = -lcp.M.col(var - n);
    }
  }
  const LuDecomposition lu(b);
  Vector x = lu.singular() ? Vector(tab.col(rhs_col)) : lu.solve(lcp.q);
  const double dust = 1e-12 * (1.0 + max_abs(lcp.q));
  sol.w = Vector::Zero(n);
  sol.z = Vector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index var = basis[static_cast<std::size_t>(k)];
    double value = x(k);
    if (value < 0.0 && value > -dust) value = 0.0;
    if (var < n) {
      sol.w(var) = value;
    } else {
      sol.z(var - n) = value;
      sol.z_basic[static_cast<std::size_t>(var - n)] = true;
    }
  }
  return sol;
}

void clamp_dust(Vector& v, double tol) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) < 0.0 && v(i) > -tol) v(i) = 0.0;
  }
}

SolveResult solve_via_lcp(const Game& game, const Partition& partition, SolveMethod method,
                          const LcpSolveOptions& options, IpmTrace* trace_out) {
  const Lcp lcp = reduce(game, partition);
  Vector w, z;
  std::size_t iterations = 0;
  if (method == SolveMethod::kPotentialReduction) {
    IpmSolution sol;
    try {
      sol = solve_potential_reduction(lcp, options.ipm);
    } catch (const IpmFailure& e) {
      if (trace_out != nullptr) *trace_out = e.trace();
      throw;
    }
    if (trace_out != nullptr) *trace_out = sol.trace;
    w = std::move(sol.w);
    z = std::move(sol.z);
    iterations = sol.iterations();
  } else if (method == SolveMethod::kPivoting) {
    PivotingSolution sol = solve_pivoting(lcp, options.pivoting);
    w = std::move(sol.w);
    z = std::move(sol.z);
    iterations = sol.pivots;
  } else {
    throw std::invalid_argument("solve_via_lcp: method must be ipm or pivot");
  }
  clamp_dust(w, options.verify_tol);
  clamp_dust(z, options.verify_tol);
  SolveResult result = recover(game, partition, lcp, w, z, options.verify_tol, method);
  result.iterations = iterations;
  return result;
}

}  // namespace tbsg
