#include "tbsg/lcp_solvers.h"

#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.h"
#include "tbsg/classic_solvers.h"
#include "tbsg/random_games.h"

namespace tbsg {
namespace {

using testing::g3;
using testing::vec;

void expect_valid_trace(const Lcp& lcp, const IpmSolution& sol, double epsilon) {
  const IpmTrace& t = sol.trace;
  EXPECT_EQ(t.termination, IpmTermination::kConverged);
  ASSERT_FALSE(t.records.empty());
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    if (t.records[k].shift == t.records[k - 1].shift) {
      EXPECT_LT(t.records[k].potential, t.records[k - 1].potential) << "record " << k;
    }
  }
  for (const IpmIterate& r : t.records) EXPECT_LE(r.direction_residual, 1e-9 * (1 + inf_norm(lcp.M)));
  EXPECT_GT(sol.w.minCoeff(), 0.0);
  EXPECT_GT(sol.z.minCoeff(), 0.0);
  EXPECT_LT(sol.w.dot(sol.z), epsilon);
  EXPECT_LE(sol.shift, epsilon * 1e-3);
  const Vector residual = sol.w - lcp.q - sol.shift * Vector::Ones(lcp.size()) - lcp.M * sol.z;
  EXPECT_LE(max_abs(residual), 1e-9 * (1 + max_abs(lcp.q)));
}

TEST(PotentialReduction, G3Converges) {
  const GnInstance inst = g3();
  const Lcp lcp = reduce(inst.game, inst.partition);
  const IpmSolution sol = solve_potential_reduction(lcp);
  expect_valid_trace(lcp, sol, 1e-9);
  EXPECT_DOUBLE_EQ(sol.rho, 3 + std::sqrt(3.0));
  const SolveResult r = recover(inst.game, inst.partition, lcp, sol.w, sol.z, 1e-6, SolveMethod::kPotentialReduction);
  // The duplicate actions at states 0 and 1 make either slot correct there.
  EXPECT_EQ(r.profile[2], 0u);
  EXPECT_LE(max_abs(r.values - vec({2, -2, 2})), 1e-9);
}

TEST(PotentialReduction, NonnegativeQApproachesZeroZ) {
  const Lcp lcp{Matrix::Identity(4, 4), Vector::Ones(4)};
  const IpmSolution sol = solve_potential_reduction(lcp);
  expect_valid_trace(lcp, sol, 1e-9);
  EXPECT_LE(max_abs(sol.w - lcp.q), 1e-8);
  EXPECT_LE(max_abs(sol.z), 1e-8);
}

TEST(PotentialReduction, ConvergesOnRandomGames) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Game g = random_game(4 + 4 * (seed % 4), 0.5 + 0.045 * static_cast<double>(seed), seed);
    const Partition p = default_partition(g);
    const Lcp lcp = reduce(g, p);
    const IpmSolution sol = solve_potential_reduction(lcp);
    expect_valid_trace(lcp, sol, 1e-9);
  }
}

TEST(PotentialReduction, LargeGameWithHighDiscount) {
  const Game g = random_game(64, 0.95, 64);
  const Lcp lcp = reduce(g, default_partition(g));
  const IpmSolution sol = solve_potential_reduction(lcp);
  expect_valid_trace(lcp, sol, 1e-9);
  EXPECT_LE(sol.iterations(), 10'000u);
}

TEST(PotentialReduction, IterationCapReportsTrace) {
  const Game g = random_game(8, 0.9, 1);
  IpmOptions opts;
  opts.max_iters = 3;
  try {
    solve_potential_reduction(reduce(g, default_partition(g)), opts);
    FAIL() << "expected IpmFailure";
  } catch (const IpmFailure& e) {
    EXPECT_EQ(e.trace().termination, IpmTermination::kMaxIterations);
    EXPECT_FALSE(e.trace().records.empty());
  }
}

TEST(PotentialReduction, RejectsBadOptions) {
  const Lcp lcp{Matrix::Identity(2, 2), Vector::Ones(2)};
  IpmOptions opts;
  opts.rho = 1.5;
  EXPECT_THROW(solve_potential_reduction(lcp, opts), std::invalid_argument);
  opts = {};
  opts.epsilon = 0.0;
  EXPECT_THROW(solve_potential_reduction(lcp, opts), std::invalid_argument);
}

TEST(TraceCsv, HeaderAndRows) {
  const GnInstance inst = g3();
  const IpmSolution sol = solve_potential_reduction(reduce(inst.game, inst.partition));
  std::ostringstream os;
  write_trace_csv(os, sol.trace);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "iter,gap,potential,step,shift");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, sol.trace.records.size());
}

TEST(Pivoting, G3ExactSolution) {
  const GnInstance inst = g3();
  const PivotingSolution sol = solve_pivoting(reduce(inst.game, inst.partition));
  EXPECT_EQ(sol.w, Vector::Zero(3));
  EXPECT_LE(max_abs(sol.z - vec({0, 0, 2})), 1e-15);
}

TEST(Pivoting, NonnegativeQNeedsNoPivots) {
  const Lcp lcp{vec({2, 1}).asDiagonal(), vec({1, 0})};
  const PivotingSolution sol = solve_pivoting(lcp);
  EXPECT_EQ(sol.pivots, 0u);
  EXPECT_EQ(sol.w, lcp.q);
  EXPECT_EQ(sol.z, Vector::Zero(2));
}

TEST(Pivoting, RayTerminationOnInfeasibleProblem) {
  const Lcp lcp{-Matrix::Identity(2, 2), vec({-1, -1})};
  EXPECT_THROW(solve_pivoting(lcp), PivotingError);
}

TEST(Pivoting, ExactComplementarityOnGameLcps) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Game g = random_game(1 + seed % 12, 0.1 + 0.0089 * static_cast<double>(seed), 2000 + seed);
    const Lcp lcp = reduce(g, default_partition(g));
    const PivotingSolution sol = solve_pivoting(lcp);
    ASSERT_EQ(sol.z_basic.size(), g.num_states());
    for (std::size_t i = 0; i < g.num_states(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      EXPECT_EQ(sol.z_basic[i] ? sol.w(k) : sol.z(k), 0.0);
    }
    EXPECT_GE(sol.w.minCoeff(), 0.0);
    EXPECT_GE(sol.z.minCoeff(), 0.0);
    EXPECT_LE(max_abs(sol.w - lcp.q - lcp.M * sol.z), 1e-10 * (1 + max_abs(lcp.q)));
  }
}

TEST(CrossSolver, RecoveredProfilesAgree) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Game g = random_game(1 + seed % 12, 0.2 + 0.0075 * static_cast<double>(seed), 3000 + seed);
    const Partition p = default_partition(g);
    const SolveResult piv = solve_via_lcp(g, p, SolveMethod::kPivoting);
    const SolveResult ipm = solve_via_lcp(g, p, SolveMethod::kPotentialReduction);
    EXPECT_TRUE(is_optimal(g, piv.profile, 1e-6).optimal);
    EXPECT_TRUE(is_optimal(g, ipm.profile, 1e-6).optimal);
    EXPECT_LE(max_abs(piv.values - ipm.values), 1e-6) << "seed " << seed;
  }
}

TEST(SolveViaLcp, ReportsIterationsAndTrace) {
  const GnInstance inst = g3();
  IpmTrace trace;
  const SolveResult r = solve_via_lcp(inst.game, inst.partition, SolveMethod::kPotentialReduction, {}, &trace);
  EXPECT_EQ(r.method, SolveMethod::kPotentialReduction);
  EXPECT_EQ(r.iterations, trace.records.size() + trace.homotopy_steps);
  EXPECT_THROW(solve_via_lcp(inst.game, inst.partition, SolveMethod::kBruteForce), std::invalid_argument);
}

TEST(ClampDust, ZeroesOnlySmallNegatives) {
  Vector v = vec({-1e-13, -1.0, 0.5, -2e-12});
  clamp_dust(v, 1e-12);
  EXPECT_EQ(v, vec({0.0, -1.0, 0.5, -2e-12}));
}

}  // namespace
}  // namespace tbsg
