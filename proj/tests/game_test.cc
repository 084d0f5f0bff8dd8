#include "tbsg/game.h"

#include <gtest/gtest.h>

#include <random>

#include "fixtures.h"
#include "tbsg/random_games.h"

namespace tbsg {
namespace {

using testing::example_game;
using testing::example_sigma;
using testing::g3;
using testing::vec;

RawGame one_state_raw() {
  RawGame raw;
  raw.gamma = 0.5;
  raw.states = {{1, {{1.0, {{0, 1.0}}}}}};
  return raw;
}

void expect_validation_error(const RawGame& raw, const std::string& needle) {
  try {
    validate_game(raw);
    FAIL() << "expected rejection containing '" << needle << "'";
  } catch (const GameValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(ValidateGame, AcceptsExampleGame) {
  const Game g = example_game();
  EXPECT_EQ(g.num_states(), 3u);
  EXPECT_EQ(g.num_actions(), 6u);
  EXPECT_EQ(g.state(1).owner, Player::kMin);
  EXPECT_EQ(g.action_index(2, 1), 5u);
  EXPECT_EQ(g.state_of_action(3), 1u);
}

TEST(ValidateGame, RejectsShortDistribution) {
  RawGame raw = one_state_raw();
  raw.states[0].actions[0].dist = {{0, 0.9}};
  expect_validation_error(raw, "distribution sum");
}

TEST(ValidateGame, RejectsDiscountOutsideOpenInterval) {
  for (double gamma : {1.0, 0.0, -0.1, 1.5}) {
    RawGame raw = one_state_raw();
    raw.gamma = gamma;
    expect_validation_error(raw, "discount out of range");
  }
}

TEST(ValidateGame, RejectsEmptyActionList) {
  RawGame raw = one_state_raw();
  raw.states.push_back({2, {}});
  expect_validation_error(raw, "empty action list");
}

TEST(ValidateGame, RejectsDanglingStateIndex) {
  RawGame raw = one_state_raw();
  raw.states[0].actions[0].dist = {{1, 1.0}};
  expect_validation_error(raw, "dangling state index");
  raw.states[0].actions[0].dist = {{-1, 1.0}};
  expect_validation_error(raw, "dangling state index");
}

TEST(ValidateGame, RejectsNegativeProbabilityAndBadOwner) {
  RawGame raw = one_state_raw();
  raw.states.push_back({2, {{0.0, {{0, 1.5}, {1, -0.5}}}}});
  expect_validation_error(raw, "negative probability");
  raw = one_state_raw();
  raw.states[0].owner = 3;
  expect_validation_error(raw, "bad owner");
}

TEST(ValidateGame, DoesNotRenormalize) {
  RawGame raw = one_state_raw();
  raw.states[0].actions[0].dist = {{0, 1.0 - 1e-13}};
  const Game g = validate_game(raw);
  EXPECT_EQ(g.state(0).actions[0].dist[0].probability, 1.0 - 1e-13);
}

TEST(MatrixRepresentation, ExampleGameMatrices) {
  const MatrixRep rep = matrix_representation(example_game());
  Matrix p(6, 3);
  p << 0, 0.5, 0.5, 1, 0, 0, 1, 0, 0, 0.5, 0.25, 0.25, 0, 1, 0, 0, 1.0 / 3.0, 2.0 / 3.0;
  Matrix j(6, 3);
  j << 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1;
  EXPECT_EQ(rep.P, p);
  EXPECT_EQ(rep.J, j);
  EXPECT_EQ(rep.c, vec({7, 3, -4, 2, 5, -10}));
  EXPECT_EQ(rep.ownership, vec({1, -1, 1}));
  EXPECT_EQ(rep.ownership_matrix(), Matrix(vec({1, -1, 1}).asDiagonal()));
}

TEST(MatrixRepresentation, SingleSelfLoop) {
  const MatrixRep rep = matrix_representation(validate_game(one_state_raw()));
  EXPECT_EQ(rep.P, Matrix::Ones(1, 1));
  EXPECT_EQ(rep.J, Matrix::Ones(1, 1));
  EXPECT_EQ(rep.ownership, vec({-1}));
}

TEST(MatrixRepresentation, RowsSumToOneAndJSelectsSource) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Game g = random_game(7, 0.8, seed, seed % 2 ? Density::kDense : Density::kSparse);
    const MatrixRep rep = matrix_representation(g);
    for (Eigen::Index a = 0; a < rep.P.rows(); ++a) {
      EXPECT_NEAR(rep.P.row(a).sum(), 1.0, 1e-12);
      EXPECT_EQ(rep.J.row(a).sum(), 1.0);
      EXPECT_EQ(rep.J(a, static_cast<Eigen::Index>(g.state_of_action(static_cast<std::size_t>(a)))), 1.0);
    }
  }
}

TEST(Restrict, ExampleProfile) {
  const Restriction r = restrict(example_game(), example_sigma());
  Matrix p(3, 3);
  p << 0, 0.5, 0.5, 0.5, 0.25, 0.25, 0, 1, 0;
  EXPECT_EQ(r.P, p);
  EXPECT_EQ(r.c, vec({7, 2, 5}));
}

TEST(Restrict, G3Profiles) {
  const GnInstance inst = g3();
  Matrix ps(3, 3), pt(3, 3);
  ps << 1, 0, 0, 0, 1, 0, 1, 0, 0;
  pt << 1, 0, 0, 0, 1, 0, 0, 1, 0;
  EXPECT_EQ(restrict(inst.game, inst.partition.sigma).P, ps);
  EXPECT_EQ(restrict(inst.game, inst.partition.tau).P, pt);
}

TEST(Restrict, SelfLoopsGiveIdentity) {
  RawGame raw;
  raw.gamma = 0.3;
  for (int i = 0; i < 4; ++i) raw.states.push_back({1 + i % 2, {{1.0 * i, {{i, 1.0}}}}});
  EXPECT_EQ(restrict(validate_game(raw), StrategyProfile::uniform_slot(4, 0)).P, Matrix::Identity(4, 4));
}

TEST(Restrict, RejectsInvalidProfile) {
  EXPECT_THROW(restrict(example_game(), StrategyProfile({0, 2, 0})), std::invalid_argument);
  EXPECT_THROW(restrict(example_game(), StrategyProfile({0, 1})), std::invalid_argument);
}

TEST(MarkovStepDistribution, ExampleTable) {
  const Matrix p = restrict(example_game(), example_sigma()).P;
  const std::vector<Vector> expected = {vec({1, 0, 0}), vec({0, 0.5, 0.5}), vec({2.0 / 8, 5.0 / 8, 1.0 / 8}),
                                        vec({10.0 / 32, 13.0 / 32, 9.0 / 32})};
  for (std::size_t t = 0; t < expected.size(); ++t) {
    EXPECT_LE(max_abs(markov_step_distribution(p, 0, t) - expected[t]), 1e-15) << "t = " << t;
  }
}

TEST(MarkovStepDistribution, ChapmanKolmogorov) {
  const Game g = random_game(6, 0.9, 3, Density::kDense);
  const Matrix p = restrict(g, StrategyProfile::uniform_slot(6, 1)).P;
  for (std::size_t s : {0u, 1u, 3u}) {
    for (std::size_t t : {0u, 2u, 5u}) {
      Vector direct = markov_step_distribution(p, 2, s + t);
      Vector composed = markov_step_distribution(p, 2, s);
      for (std::size_t k = 0; k < t; ++k) composed = (composed.transpose() * p).transpose();
      EXPECT_LE(max_abs(direct - composed), 1e-12);
      EXPECT_NEAR(direct.sum(), 1.0, 1e-12);
      EXPECT_GE(direct.minCoeff(), 0.0);
    }
  }
}

TEST(ValueVector, G3Profiles) {
  const GnInstance inst = g3();
  EXPECT_LE(max_abs(value_vector(inst.game, inst.partition.tau) - vec({2, -2, 0})), 1e-12);
  EXPECT_LE(max_abs(value_vector(inst.game, inst.partition.sigma) - vec({2, -2, 2})), 1e-12);
}

TEST(ValueVector, ZeroCostsGiveZero) {
  RawGame raw = example_game().to_raw();
  for (auto& s : raw.states)
    for (auto& a : s.actions) a.cost = 0.0;
  EXPECT_EQ(value_vector(validate_game(raw), example_sigma()), Vector::Zero(3));
}

TEST(ValueVector, SatisfiesBellmanEquationAndMatchesSeries) {
  const Game g = example_game(0.9);
  const Restriction r = restrict(g, example_sigma());
  const Vector v = value_vector(g, example_sigma());
  EXPECT_LE(max_abs(v - r.c - 0.9 * r.P * v), 1e-9 * (1 + max_abs(v)));
  // Truncated geometric series as an independent oracle.
  Vector series = Vector::Zero(3);
  Matrix power = Matrix::Identity(3, 3);
  double discount = 1.0;
  for (int t = 0; t < 600; ++t) {
    series += discount * power * r.c;
    power = power * r.P;
    discount *= 0.9;
  }
  EXPECT_LE(max_abs(v - series), 1e-9);
}

TEST(ValueVector, RowSumIdentity) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double gamma = 0.1 + 0.04 * static_cast<double>(seed);
    const Game g = random_game(8, gamma, seed);
    const Matrix p = restrict(g, StrategyProfile::uniform_slot(8, seed % 2)).P;
    const Vector ones = Vector::Ones(8);
    const Vector x = LuDecomposition(Matrix::Identity(8, 8) - gamma * p).solve(ones);
    EXPECT_LE(max_abs(x - ones / (1.0 - gamma)), 1e-9);
  }
}

TEST(ReducedCosts, G3HandValues) {
  const GnInstance inst = g3();
  const Game& g = inst.game;
  const Vector rc_tau = reduced_costs(g, inst.partition.tau);
  EXPECT_NEAR(rc_tau(static_cast<Eigen::Index>(g.action_index(2, 0))), 2.0, 1e-12);
  const Vector rc_sigma = reduced_costs(g, inst.partition.sigma);
  EXPECT_NEAR(rc_sigma(static_cast<Eigen::Index>(g.action_index(2, 1))), -2.0, 1e-12);
}

TEST(ReducedCosts, ChosenActionsAreZero) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Game g = random_game(6, 0.7, seed);
    std::mt19937_64 rng(seed);
    StrategyProfile p = StrategyProfile::uniform_slot(6, 0);
    for (std::size_t i = 0; i < 6; ++i) p[i] = rng() % 2;
    const Vector rc = reduced_costs(g, p);
    for (std::size_t a : chosen_actions(g, p)) EXPECT_NEAR(rc(static_cast<Eigen::Index>(a)), 0.0, 1e-9);
  }
}

TEST(IsOptimal, G3Verdicts) {
  const GnInstance inst = g3();
  EXPECT_TRUE(is_optimal(inst.game, inst.partition.sigma).optimal);
  const OptimalityReport r = is_optimal(inst.game, inst.partition.tau);
  EXPECT_FALSE(r.optimal);
  ASSERT_EQ(r.violating_actions.size(), 1u);
  EXPECT_EQ(r.violating_actions[0], inst.game.action_index(2, 0));
  EXPECT_NEAR(r.max_violation, 2.0, 1e-12);
}

TEST(IsOptimal, SingleActionGameAlwaysOptimal) {
  RawGame raw;
  raw.gamma = 0.6;
  raw.states = {{1, {{3.0, {{1, 1.0}}}}}, {2, {{-1.0, {{0, 0.5}, {1, 0.5}}}}}};
  EXPECT_TRUE(is_optimal(validate_game(raw), StrategyProfile::uniform_slot(2, 0)).optimal);
}

TEST(CostScaling, ScalesValuesAndReducedCostsAndKeepsVerdicts) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Game g = random_game(5, 0.85, seed);
    RawGame raw = g.to_raw();
    const double lambda = 3.7;
    for (auto& s : raw.states)
      for (auto& a : s.actions) a.cost *= lambda;
    const Game scaled = validate_game(raw);
    for (std::size_t code = 0; code < 32; ++code) {
      StrategyProfile p = StrategyProfile::uniform_slot(5, 0);
      for (std::size_t i = 0; i < 5; ++i) p[i] = (code >> i) & 1u;
      const Vector v = value_vector(g, p);
      EXPECT_LE(max_abs(value_vector(scaled, p) - lambda * v), 1e-9 * (1 + lambda * max_abs(v)));
      const Vector rc = reduced_costs(g, p);
      EXPECT_LE(max_abs(reduced_costs(scaled, p) - lambda * rc), 1e-9 * (1 + lambda * max_abs(rc)));
      EXPECT_EQ(is_optimal(g, p).optimal, is_optimal(scaled, p).optimal);
    }
  }
}

}  // namespace
}  // namespace tbsg
