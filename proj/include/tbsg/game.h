#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tbsg/linalg.h"

namespace tbsg {

/// Player 1 minimizes the discounted cost, Player 2 maximizes it.
enum class Player : int { kMin = 1, kMax = 2 };

struct Transition {
  std::size_t state = 0;
  double probability = 0.0;
};

struct Action {
  double cost = 0.0;
  std::vector<Transition> dist;  // sparse, validated, never renormalized
};

struct State {
  Player owner = Player::kMin;
  std::vector<Action> actions;
};

// Unvalidated description, as read from a file or assembled by a generator.
// Indices are signed so that dangling references can be reported.
struct RawAction {
  double cost = 0.0;
  std::vector<std::pair<std::int64_t, double>> dist;
};
struct RawState {
  int owner = 1;
  std::vector<RawAction> actions;
};
struct RawGame {
  double gamma = 0.0;
  std::vector<RawState> states;
};

class GameValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A discounted two-player turn-based stochastic game. Only obtainable
/// through validate_game, so every instance satisfies the invariants.
///
/// Actions are numbered globally in (state, slot) order; the action with
/// global index offset(i) + k is slot k of state i.
class Game {
 public:
  double gamma() const { return gamma_; }
  std::size_t num_states() const { return states_.size(); }
  std::size_t num_actions() const { return action_state_.size(); }
  const State& state(std::size_t i) const { return states_.at(i); }
  const std::vector<State>& states() const { return states_; }

  std::size_t offset(std::size_t i) const { return offsets_.at(i); }
  std::size_t action_index(std::size_t state, std::size_t slot) const;
  std::size_t state_of_action(std::size_t a) const { return action_state_.at(a); }
  const Action& action(std::size_t a) const;

  RawGame to_raw() const;

 private:
  friend Game validate_game(const RawGame& raw);
  Game() = default;

  double gamma_ = 0.0;
  std::vector<State> states_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> action_state_;
};

/// Checks every invariant and returns the validated game. Throws
/// GameValidationError with one of the messages "distribution sum",
/// "discount out of range", "empty action list", "dangling state index",
/// "negative probability", "bad owner".
Game validate_game(const RawGame& raw);

/// One chosen action slot per state.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  explicit StrategyProfile(std::vector<std::size_t> choice) : choice_(std::move(choice)) {}

  static StrategyProfile uniform_slot(std::size_t num_states, std::size_t slot) {
    return StrategyProfile(std::vector<std::size_t>(num_states, slot));
  }

  std::size_t size() const { return choice_.size(); }
  std::size_t operator[](std::size_t i) const { return choice_[i]; }
  std::size_t& operator[](std::size_t i) { return choice_[i]; }
  const std::vector<std::size_t>& choice() const { return choice_; }

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
  friend auto operator<=>(const StrategyProfile&, const StrategyProfile&) = default;

 private:
  std::vector<std::size_t> choice_;
};

/// Throws std::invalid_argument if the profile does not fit the game.
void check_profile(const Game& game, const StrategyProfile& profile);

/// Global action indices of the chosen actions, in state order.
std::vector<std::size_t> chosen_actions(const Game& game, const StrategyProfile& profile);

struct MatrixRep {
  Matrix P;          // m x n transition probabilities
  Vector c;          // m costs
  Matrix J;          // m x n source indicator
  Vector ownership;  // diagonal of the n x n ownership matrix: -1 Player 1, +1 Player 2

  Matrix ownership_matrix() const { return ownership.asDiagonal(); }
};

MatrixRep matrix_representation(const Game& game);

struct Restriction {
  Matrix P;  // n x n
  Vector c;  // n
};

Restriction restrict(const MatrixRep& rep, const Game& game, const StrategyProfile& profile);
Restriction restrict(const Game& game, const StrategyProfile& profile);

/// Row `start` of P^t: the state distribution after t steps of the chain.
Vector markov_step_distribution(const Matrix& p_sigma, std::size_t start, std::size_t t);

/// Solves (I - gamma P_sigma) v = c_sigma.
Vector value_vector(const Game& game, const StrategyProfile& profile);

/// c_a + gamma P_a v - v_i for every action a of state i.
Vector reduced_costs(const Game& game, const StrategyProfile& profile);
Vector reduced_costs(const Game& game, const Vector& values);

struct OptimalityReport {
  bool optimal = true;
  std::vector<std::size_t> violating_actions;  // global indices
  double max_violation = 0.0;                  // 0 when optimal
};

constexpr double kDefaultOptimalityTol = 1e-9;

/// Player 1 actions must have nonnegative reduced cost, Player 2 actions
/// nonpositive, each up to `tol`.
OptimalityReport is_optimal(const Game& game, const StrategyProfile& profile,
                            double tol = kDefaultOptimalityTol);

}  // namespace tbsg
