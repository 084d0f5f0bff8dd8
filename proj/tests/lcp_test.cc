#include "tbsg/lcp.h"

#include <gtest/gtest.h>

#include <Eigen/LU>
#include <random>

#include "fixtures.h"
#include "tbsg/classic_solvers.h"
#include "tbsg/conditioning.h"
#include "tbsg/lcp_solvers.h"
#include "tbsg/random_games.h"

namespace tbsg {
namespace {

using testing::example_game;
using testing::g3;
using testing::vec;

// M and q through an explicit inverse, as an independent reference.
Lcp reference_lcp(const Game& g, const Partition& part) {
  const MatrixRep rep = matrix_representation(g);
  const Restriction s = restrict(rep, g, part.sigma);
  const Restriction t = restrict(rep, g, part.tau);
  const auto n = s.P.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix d = rep.ownership.asDiagonal();
  const Matrix x = (id - g.gamma() * s.P) * Eigen::FullPivLU<Matrix>(id - g.gamma() * t.P).inverse();
  return {d * x * d, d * x * t.c - d * s.c};
}

Partition optimal_as_tau(const Game& g) {
  const StrategyProfile star = brute_force_solve(g).profile;
  StrategyProfile other = star;
  for (std::size_t i = 0; i < g.num_states(); ++i) other[i] = 1 - star[i];
  return {other, star};
}

TEST(DefaultPartition, SlotZeroAndSlotOne) {
  const GnInstance inst = g3();
  const Partition p = default_partition(inst.game);
  EXPECT_EQ(p.sigma, inst.partition.sigma);
  EXPECT_EQ(p.tau, inst.partition.tau);
  const Partition e = default_partition(example_game());
  EXPECT_EQ(e.sigma, StrategyProfile({0, 0, 0}));
  EXPECT_EQ(e.tau, StrategyProfile({1, 1, 1}));
}

TEST(DefaultPartition, RejectsThreeActionState) {
  RawGame raw = example_game().to_raw();
  raw.states[1].actions.push_back({0.0, {{1, 1.0}}});
  try {
    default_partition(validate_game(raw));
    FAIL();
  } catch (const ReductionError& e) {
    EXPECT_NE(std::string(e.what()).find("state 1"), std::string::npos);
  }
}

TEST(CheckPartition, RejectsOverlap) {
  EXPECT_THROW(check_partition(example_game(), {StrategyProfile({0, 1, 0}), StrategyProfile({1, 1, 1})}),
               ReductionError);
}

TEST(Reduce, G3HandComputed) {
  const GnInstance inst = g3();
  const Lcp lcp = reduce(inst.game, inst.partition);
  Matrix m(3, 3);
  m << 1, 0, 0, 0, 1, 0, -1, 1, 1;
  EXPECT_LE((lcp.M - m).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE(max_abs(lcp.q - vec({0, 0, -2})), 1e-15);
}

TEST(Reduce, MatchesExplicitInverse) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Game g = random_game(1 + seed % 10, 0.2 + 0.025 * static_cast<double>(seed), seed,
                               seed % 2 ? Density::kDense : Density::kSparse);
    const Partition p = default_partition(g);
    const Lcp lcp = reduce(g, p);
    const Lcp ref = reference_lcp(g, p);
    EXPECT_LE((lcp.M - ref.M).cwiseAbs().maxCoeff(), 1e-10 * (1 + ref.M.cwiseAbs().maxCoeff()));
    EXPECT_LE(max_abs(lcp.q - ref.q), 1e-10 * (1 + max_abs(ref.q)));
  }
}

TEST(Reduce, IdenticalDistributionsGiveIdentity) {
  RawGame raw = example_game().to_raw();
  for (auto& s : raw.states) s.actions[1].dist = s.actions[0].dist;
  const Game g = validate_game(raw);
  const Lcp lcp = reduce(g, default_partition(g));
  EXPECT_LE((lcp.M - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
  const MatrixRep rep = matrix_representation(g);
  const Vector expected = rep.ownership.cwiseProduct(vec({3 - 7, 2 - (-4), -10 - 5}));
  EXPECT_LE(max_abs(lcp.q - expected), 1e-12);
}

TEST(Reduce, ReconstructionIdentity) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Game g = random_game(8, 0.9, seed);
    const Partition p = default_partition(g);
    const Lcp lcp = reduce(g, p);
    const MatrixRep rep = matrix_representation(g);
    const Matrix a_s = Matrix::Identity(8, 8) - 0.9 * restrict(rep, g, p.sigma).P;
    const Matrix a_t = Matrix::Identity(8, 8) - 0.9 * restrict(rep, g, p.tau).P;
    const Matrix d = rep.ownership.asDiagonal();
    for (int k = 0; k < 10; ++k) {
      Vector x(8);
      for (Eigen::Index i = 0; i < 8; ++i) x(i) = normal(rng);
      const Vector lhs = lcp.M * (d * (a_t * x));
      const Vector rhs = d * (a_s * x);
      EXPECT_LE(max_abs(lhs - rhs), 1e-9 * (1 + max_abs(rhs)));
    }
  }
}

TEST(Reduce, CostScalingLeavesMAndScalesQ) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Game g = random_game(6, 0.8, seed);
    RawGame raw = g.to_raw();
    for (auto& s : raw.states)
      for (auto& a : s.actions) a.cost *= 2.5;
    const Game scaled = validate_game(raw);
    const Partition p = default_partition(g);
    const Lcp a = reduce(g, p);
    const Lcp b = reduce(scaled, p);
    EXPECT_EQ(a.M, b.M);
    EXPECT_LE(max_abs(b.q - 2.5 * a.q), 1e-9 * (1 + max_abs(b.q)));
    const SolveResult ra = solve_via_lcp(g, p, SolveMethod::kPivoting);
    const SolveResult rb = solve_via_lcp(scaled, p, SolveMethod::kPivoting);
    EXPECT_EQ(ra.profile, rb.profile);
  }
}

TEST(Reduce, GameMatricesAdmitWitnesses) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Game g = random_game(10, 0.95, seed);
    const Partition p = default_partition(g);
    const Matrix m = reduce(g, p).M;
    const GameWitnessContext ctx(g, p);
    for (int k = 0; k < 1000; ++k) {
      Vector x(10);
      for (Eigen::Index i = 0; i < 10; ++i) x(i) = normal(rng);
      const auto j = pmatrix_witness_check(m, x, &ctx);
      ASSERT_TRUE(j.has_value());
      const auto jj = static_cast<Eigen::Index>(*j);
      EXPECT_GT(x(jj) * (m * x)(jj), 0.0);
    }
  }
}

TEST(VerifyLcpSolution, ExactG3SolutionHasZeroResiduals) {
  const GnInstance inst = g3();
  const LcpResidual r = verify_lcp_solution(reduce(inst.game, inst.partition), Vector::Zero(3), vec({0, 0, 2}), 1e-12);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.feasibility, 0.0);
  EXPECT_EQ(r.complementarity, 0.0);
}

TEST(VerifyLcpSolution, ZeroPairFailsFeasibilityByNormOfQ) {
  const Lcp lcp{Matrix::Identity(2, 2), vec({3, -4})};
  const LcpResidual r = verify_lcp_solution(lcp, Vector::Zero(2), Vector::Zero(2), 1e-9);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.feasibility, 4.0);
}

TEST(VerifyLcpSolution, NonnegativeQIsSolvedByZeroZ) {
  const Lcp lcp{Matrix::Identity(2, 2), vec({3, 0})};
  EXPECT_TRUE(verify_lcp_solution(lcp, lcp.q, Vector::Zero(2), 1e-12).pass);
  EXPECT_THROW(verify_lcp_solution(lcp, Vector::Zero(3), Vector::Zero(2), 1e-12), std::invalid_argument);
}

TEST(Recover, G3ExactSolution) {
  const GnInstance inst = g3();
  const SolveResult r = recover(inst.game, inst.partition, Vector::Zero(3), vec({0, 0, 2}), 1e-9,
                                SolveMethod::kPivoting);
  EXPECT_EQ(r.profile, inst.partition.sigma);
  EXPECT_LE(max_abs(r.values - vec({2, -2, 2})), 1e-12);
  EXPECT_LE(max_abs(values_from_lcp(inst.game, inst.partition, vec({0, 0, 2})) - vec({2, -2, 2})), 1e-12);
}

TEST(Recover, ZeroZGivesTauValues) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Game g = random_game(6, 0.7, seed);
    const Partition p = optimal_as_tau(g);
    const Lcp lcp = reduce(g, p);
    ASSERT_GE(lcp.q.minCoeff(), -1e-9);
    const SolveResult r = recover(g, p, lcp, lcp.q.cwiseMax(0.0), Vector::Zero(6), 1e-9, SolveMethod::kPivoting);
    EXPECT_EQ(r.profile, p.tau);
    EXPECT_LE(max_abs(values_from_lcp(g, p, Vector::Zero(6)) - value_vector(g, p.tau)), 1e-9);
  }
}

TEST(Recover, ToleratesTinyNoise) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> noise(0.0, 1e-10);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Game g = random_game(7, 0.8, seed);
    const Partition p = default_partition(g);
    const Lcp lcp = reduce(g, p);
    const PivotingSolution exact = solve_pivoting(lcp);
    const StrategyProfile expected = recover(g, p, lcp, exact.w, exact.z, 1e-9, SolveMethod::kPivoting).profile;
    Vector w = exact.w, z = exact.z;
    for (Eigen::Index i = 0; i < 7; ++i) {
      w(i) += noise(rng);
      z(i) += noise(rng);
    }
    EXPECT_EQ(recover(g, p, lcp, w, z, 1e-6, SolveMethod::kPivoting).profile, expected);
  }
}

TEST(Recover, RejectsNonSolution) {
  const GnInstance inst = g3();
  EXPECT_THROW(recover(inst.game, inst.partition, Vector::Zero(3), Vector::Zero(3), 1e-9, SolveMethod::kPivoting),
               RecoveryError);
}

TEST(RoundTrip, PivotingMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Game g = random_game(1 + seed % 8, 0.15 + 0.02 * static_cast<double>(seed), 500 + seed);
    const SolveResult r = solve_via_lcp(g, default_partition(g), SolveMethod::kPivoting);
    EXPECT_LE(max_abs(r.values - brute_force_solve(g).values), 1e-6) << "seed " << seed;
  }
}

TEST(RoundTrip, SwappedPartitionRecoversSameValues) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Game g = random_game(6, 0.9, seed);
    const Partition p = default_partition(g);
    const Partition swapped{p.tau, p.sigma};
    const SolveResult a = solve_via_lcp(g, p, SolveMethod::kPivoting);
    const SolveResult b = solve_via_lcp(g, swapped, SolveMethod::kPivoting);
    EXPECT_LE(max_abs(a.values - b.values), 1e-6);
  }
}

}  // namespace
}  // namespace tbsg
