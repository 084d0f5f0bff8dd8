#pragma once

#include <cstddef>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tbsg/game.h"

namespace tbsg {

enum class SolveMethod { kValueIteration, kStrategyIteration, kBruteForce, kPotentialReduction, kPivoting };

std::string_view method_name(SolveMethod method);

struct SolveResult {
  Vector values;  // value vector of `profile`
  StrategyProfile profile;
  std::size_t iterations = 0;
  SolveMethod method = SolveMethod::kBruteForce;
  // Value-iteration iterates v_0, v_1, ... or strategy-iteration values per
  // improvement round; only filled on request.
  std::vector<Vector> iterates;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One Bellman application: min (Player 1) / max (Player 2) over the
/// actions of each state of c_a + gamma P_a v. Ties go to the lowest slot.
Vector bellman_update(const Game& game, const Vector& values, StrategyProfile* greedy = nullptr);

struct ValueIterationOptions {
  std::size_t max_iters = 1'000'000;
  bool record_iterates = false;
};

/// Iterates from v_0 = 0 and stops once ||v_{t+1} - v_t||_inf <=
/// accuracy (1 - gamma) / (2 gamma), which puts v_{t+1} within `accuracy`
/// of the optimum. The result carries the greedy profile of the last
/// iterate and that profile's exact value vector.
SolveResult value_iteration(const Game& game, double accuracy, const ValueIterationOptions& options = {});

struct StrategyIterationOptions {
  double tol = kDefaultOptimalityTol;
  std::size_t max_rounds = 100'000;
  bool record_iterates = false;
};

/// Player 2 switches every state with a strictly improving action to its
/// best one (lowest slot on ties); Player 1 answers each Player 2 strategy
/// with a best response computed the same way. Terminates when no state of
/// either player has an improving action.
SolveResult strategy_iteration(const Game& game, StrategyProfile initial,
                               const StrategyIterationOptions& options = {});
SolveResult strategy_iteration(const Game& game, const StrategyIterationOptions& options = {});

struct BruteForceOptions {
  std::size_t max_profiles = 1'000'000;
  double tol = kDefaultOptimalityTol;
  unsigned threads = 1;
};

/// Enumerates profiles in lexicographic slot order (last state varies
/// fastest) and returns the first that satisfies the optimality condition.
SolveResult brute_force_solve(const Game& game, const BruteForceOptions& options = {});

}  // namespace tbsg
