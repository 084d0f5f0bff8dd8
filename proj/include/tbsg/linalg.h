#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tbsg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense LU factorization PA = LU with partial (row) pivoting.
///
/// A pivot is declared singular when its magnitude falls below
/// 1e-13 times the max-abs entry of the original row it came from. The
/// factorization itself never throws; `solve` does when singular.
class LuDecomposition {
 public:
  static constexpr double kSingularRatio = 1e-13;

  explicit LuDecomposition(const Matrix& a);

  Eigen::Index size() const { return lu_.rows(); }
  bool singular() const { return singular_; }
  double determinant() const;

  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;

 private:
  Matrix lu_;
  std::vector<Eigen::Index> perm_;
  int parity_ = 1;
  bool singular_ = false;
};

/// Solves a x = b and checks ||a x - b||_inf <= rel_tol * (||a||_inf ||x||_inf + ||b||_inf).
Vector solve_checked(const LuDecomposition& lu, const Matrix& a, const Vector& b,
                     double rel_tol);

double inf_norm(const Matrix& a);  // max absolute row sum
double max_abs(const Vector& v);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // column k pairs with values(k)
  int sweeps = 0;
};

class EigenSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cyclic Jacobi rotations on a symmetric matrix until the off-diagonal
/// Frobenius norm is <= tol * ||A||_F.
SymmetricEigen jacobi_eigen(const Matrix& symmetric, double tol = 1e-12,
                            int max_sweeps = 100);

}  // namespace tbsg
