#pragma once

#include <stdexcept>

#include "tbsg/classic_solvers.h"
#include "tbsg/game.h"

namespace tbsg {

/// Find w = q + M z with w, z >= 0 and w^T z = 0.
struct Lcp {
  Matrix M;
  Vector q;

  Eigen::Index size() const { return q.size(); }
};

/// Two disjoint profiles covering every action of a two-action game.
struct Partition {
  StrategyProfile sigma;
  StrategyProfile tau;
};

class ReductionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// sigma = slot 0 everywhere, tau = slot 1. Rejects games with a state that
/// does not have exactly two actions.
Partition default_partition(const Game& game);

void check_partition(const Game& game, const Partition& partition);

/// M = I (I - g P_sigma)(I - g P_tau)^{-1} I,
/// q = I (I - g P_sigma)(I - g P_tau)^{-1} c_tau - I c_sigma,
/// where I is the ownership diagonal. The inverse is never formed: rows of
/// (I - g P_sigma)(I - g P_tau)^{-1} come from transposed LU solves.
Lcp reduce(const Game& game, const Partition& partition);

/// y = (I - g P_tau)^{-1} (c_tau + I z).
Vector values_from_lcp(const Game& game, const Partition& partition, const Vector& z);

struct LcpResidual {
  double feasibility = 0.0;      // ||w - q - M z||_inf
  double complementarity = 0.0;  // w^T z
  double min_w = 0.0;
  double min_z = 0.0;
  bool pass = false;
};

/// Passes iff feasibility <= tol (1 + ||q||_inf), w^T z <= tol, and
/// min(w), min(z) >= -tol.
LcpResidual verify_lcp_solution(const Lcp& lcp, const Vector& w, const Vector& z, double tol);

class RecoveryError : public std::runtime_error {
 public:
  RecoveryError(const std::string& what, double max_violation)
      : std::runtime_error(what), max_violation_(max_violation) {}
  double max_violation() const { return max_violation_; }

 private:
  double max_violation_;
};

/// Picks sigma(i) when w_i <= z_i and tau(i) otherwise, then verifies the
/// profile by the reduced-cost sign conditions at `tol`. Throws
/// RecoveryError if (w, z) fails verification or the profile is not optimal.
SolveResult recover(const Game& game, const Partition& partition, const Lcp& lcp, const Vector& w,
                    const Vector& z, double tol, SolveMethod method = SolveMethod::kPivoting);
SolveResult recover(const Game& game, const Partition& partition, const Vector& w,
                    const Vector& z, double tol, SolveMethod method = SolveMethod::kPivoting);

}  // namespace tbsg
