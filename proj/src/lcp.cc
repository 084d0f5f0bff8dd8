#include "tbsg/lcp.h"

#include <algorithm>
#include <sstream>

namespace tbsg {

namespace {

constexpr double kReductionSolveTol = 1e-10;

struct PartitionMatrices {
  Matrix a_sigma;  // I - gamma P_sigma
  Matrix a_tau;    // I - gamma P_tau
  Vector c_sigma;
  Vector c_tau;
  Vector ownership;
};

PartitionMatrices partition_matrices(const Game& game, const Partition& partition) {
  check_partition(game, partition);
  const MatrixRep rep = matrix_representation(game);
  const Restriction s = restrict(rep, game, partition.sigma);
  const Restriction t = restrict(rep, game, partition.tau);
  const auto n = static_cast<Eigen::Index>(game.num_states());
  const Matrix id = Matrix::Identity(n, n);
  return {id - game.gamma() * s.P, id - game.gamma() * t.P, s.c, t.c, rep.ownership};
}

}  // namespace

Partition default_partition(const Game& game) {
  for (std::size_t i = 0; i < game.num_states(); ++i) {
    if (game.state(i).actions.size() != 2) {
      throw ReductionError("state " + std::to_string(i) + " has " +
                           std::to_string(game.state(i).actions.size()) +
                           " actions; the LCP reduction needs exactly 2 per state");
    }
  }
  return {StrategyProfile::uniform_slot(game.num_states(), 0),
          StrategyProfile::uniform_slot(game.num_states(), 1)};
}

void check_partition(const Game& game, const Partition& partition) {
  check_profile(game, partition.sigma);
  check_profile(game, partition.tau);
  for (std::size_t i = 0; i < game.num_states(); ++i) {
    if (game.state(i).actions.size() != 2) {
      throw ReductionError("state " + std::to_string(i) +
                           " does not have exactly 2 actions; cannot partition");
    }
    if (partition.sigma[i] == partition.tau[i]) {
      throw ReductionError("sigma and tau pick the same action at state " + std::to_string(i));
    }
  }
}

Lcp reduce(const Game& game, const Partition& partition) {
  const PartitionMatrices pm = partition_matrices(game, partition);
  const auto n = pm.a_tau.rows();

  // X = A_sigma A_tau^{-1}, obtained row by row from A_tau^T X^T = A_sigma^T.
  const Matrix a_tau_t = pm.a_tau.transpose();
  const LuDecomposition lu(a_tau_t);
  Matrix x_t(n, n);
  try {
    for (Eigen::Index j = 0; j < n; ++j) {
      x_t.col(j) = solve_checked(lu, a_tau_t, Vector(pm.a_sigma.row(j).transpose()), kReductionSolveTol);
    }
  } catch (const SingularMatrixError& e) {
    throw NumericFailure(std::string("reduce: (I - gamma P_tau) solve failed, likely an encoding bug: ") +
                         e.what());
  }
  const Matrix x = x_t.transpose();

  Lcp lcp;
  lcp.M = pm.ownership.asDiagonal() * x * pm.ownership.asDiagonal();
  lcp.q = pm.ownership.asDiagonal() * (x * pm.c_tau) - pm.ownership.cwiseProduct(pm.c_sigma);
  return lcp;
}

Vector values_from_lcp(const Game& game, const Partition& partition, const Vector& z) {
  const PartitionMatrices pm = partition_matrices(game, partition);
  const LuDecomposition lu(pm.a_tau);
  try {
    return solve_checked(lu, pm.a_tau, pm.c_tau + pm.ownership.cwiseProduct(z), kReductionSolveTol);
  } catch (const SingularMatrixError& e) {
    throw NumericFailure(std::string("values_from_lcp: ") + e.what());
  }
}

LcpResidual verify_lcp_solution(const Lcp& lcp, const Vector& w, const Vector& z, double tol) {
  if (w.size() != lcp.size() || z.size() != lcp.size()) {
    throw std::invalid_argument("verify_lcp_solution: dimension mismatch");
  }
  LcpResidual r;
  r.feasibility = max_abs(w - lcp.q - lcp.M * z);
  r.complementarity = w.dot(z);
  r.min_w = w.size() ? w.minCoeff() : 0.0;
  r.min_z = z.size() ? z.minCoeff() : 0.0;
  r.pass = r.feasibility <= tol * (1.0 + max_abs(lcp.q)) && r.complementarity <= tol &&
           r.min_w >= -tol && r.min_z >= -tol;
  return r;
}

SolveResult recover(const Game& game, const Partition& partition, const Lcp& lcp, const Vector& w,
                    const Vector& z, double tol, SolveMethod method) {
  check_partition(game, partition);
  const LcpResidual res = verify_lcp_solution(lcp, w, z, tol);
  if (!res.pass) {
    std::ostringstream os;
    os << "recover: LCP solution fails verification (feasibility " << res.feasibility
       << ", w^T z " << res.complementarity << ", min w " << res.min_w << ", min z " << res.min_z << ")";
    throw RecoveryError(os.str(), std::max({res.feasibility, std::abs(res.complementarity),
                                            -res.min_w, -res.min_z}));
  }
  std::vector<std::size_t> choice(game.num_states());
  for (std::size_t i = 0; i < choice.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    choice[i] = w(k) <= z(k) ? partition.sigma[i] : partition.tau[i];
  }
  SolveResult result;
  result.method = method;
  result.profile = StrategyProfile(std::move(choice));
  const OptimalityReport report = is_optimal(game, result.profile, tol);
  if (!report.optimal) {
    std::ostringstream os;
    os << "recover: extracted profile is not optimal, max reduced-cost violation "
       << report.max_violation;
    throw RecoveryError(os.str(), report.max_violation);
  }
  result.values = value_vector(game, result.profile);
  return result;
}

SolveResult recover(const Game& game, const Partition& partition, const Vector& w, const Vector& z,
                    double tol, SolveMethod method) {
  return recover(game, partition, reduce(game, partition), w, z, tol, method);
}

}  // namespace tbsg
