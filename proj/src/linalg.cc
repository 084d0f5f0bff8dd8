#include "tbsg/linalg.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tbsg {

LuDecomposition::LuDecomposition(const Matrix& a) : lu_(a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("LuDecomposition: matrix must be square");
  }
  const Eigen::Index n = a.rows();
  perm_.resize(static_cast<std::size_t>(n));
  std::iota(perm_.begin(), perm_.end(), Eigen::Index{0});
  Vector row_scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    row_scale(i) = a.row(i).cwiseAbs().maxCoeff();
  }

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot = k;
    double best = std::abs(lu_(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        pivot = i;
      }
    }
    if (pivot != k) {
      lu_.row(k).swap(lu_.row(pivot));
      std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(pivot)]);
      std::swap(row_scale(k), row_scale(pivot));
      parity_ = -parity_;
    }
    if (best <= kSingularRatio * row_scale(k)) {
      singular_ = true;
    }
    if (best == 0.0) {
      continue;
    }
    const double inv = 1.0 / lu_(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double factor = lu_(i, k) * inv;
      lu_(i, k) = factor;
      if (factor != 0.0) {
        lu_.block(i, k + 1, 1, n - k - 1) -= factor * lu_.block(k, k + 1, 1, n - k - 1);
      }
    }
  }
}

double LuDecomposition::determinant() const {
  double det = parity_;
  for (Eigen::Index i = 0; i < lu_.rows(); ++i) det *= lu_(i, i);
  return det;
}

Vector LuDecomposition::solve(const Vector& b) const {
  if (singular_) {
    throw SingularMatrixError("LuDecomposition::solve: matrix is numerically singular");
  }
  const Eigen::Index n = lu_.rows();
  if (b.size() != n) {
    throw std::invalid_argument("LuDecomposition::solve: dimension mismatch");
  }
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = b(perm_[static_cast<std::size_t>(i)]);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = x(i);
    for (Eigen::Index j = 0; j < i; ++j) s -= lu_(i, j) * x(j);
    x(i) = s;
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = x(i);
    for (Eigen::Index j = i + 1; j < n; ++j) s -= lu_(i, j) * x(j);
    x(i) = s / lu_(i, i);
  }
  return x;
}

Matrix LuDecomposition::solve(const Matrix& b) const {
  Matrix x(b.rows(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) x.col(j) = solve(Vector(b.col(j)));
  return x;
}

Vector solve_checked(const LuDecomposition& lu, const Matrix& a, const Vector& b,
                     double rel_tol) {
  Vector x = lu.solve(b);
  const double residual = max_abs(a * x - b);
  const double scale = inf_norm(a) * max_abs(x) + max_abs(b);
  if (residual > rel_tol * std::max(scale, 1e-300)) {
    throw SingularMatrixError("linear solve residual " + std::to_string(residual) +
                              " exceeds tolerance");
  }
  return x;
}

double inf_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

double max_abs(const Vector& v) {
  if (v.size() == 0) return 0.0;
  return v.cwiseAbs().maxCoeff();
}

SymmetricEigen jacobi_eigen(const Matrix& symmetric, double tol, int max_sweeps) {
  if (symmetric.rows() != symmetric.cols()) {
    throw std::invalid_argument("jacobi_eigen: matrix must be square");
  }
  const Eigen::Index n = symmetric.rows();
  Matrix a = 0.5 * (symmetric + symmetric.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double norm = a.norm();

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  SymmetricEigen out;
  int sweep = 0;
  for (; off_norm() > tol * norm; ++sweep) {
    if (sweep >= max_sweeps) {
      throw EigenSolverError("jacobi_eigen: sweep cap exceeded");
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // A <- A J, then A <- J^T A, with J the (p, q) rotation.
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  out.sweeps = sweep;
  return out;
}

}  // namespace tbsg
