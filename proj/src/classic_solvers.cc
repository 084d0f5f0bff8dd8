#include "tbsg/classic_solvers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <thread>

namespace tbsg {

std::string_view method_name(SolveMethod method) {
  switch (method) {
    case SolveMethod::kValueIteration: return "vi";
    case SolveMethod::kStrategyIteration: return "si";
    case SolveMethod::kBruteForce: return "brute";
    case SolveMethod::kPotentialReduction: return "ipm";
    case SolveMethod::kPivoting: return "pivot";
  }
  return "unknown";
}

Vector bellman_update(const Game& game, const Vector& values, StrategyProfile* greedy) {
  const std::size_t n = game.num_states();
  Vector next(static_cast<Eigen::Index>(n));
  std::vector<std::size_t> choice(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const State& s = game.state(i);
    const bool minimize = s.owner == Player::kMin;
    double best = minimize ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < s.actions.size(); ++k) {
      const Action& a = s.actions[k];
      double expected = 0.0;
      for (const Transition& t : a.dist) expected += t.probability * values(static_cast<Eigen::Index>(t.state));
      const double q = a.cost + game.gamma() * expected;
      if (minimize ? q < best : q > best) {
        best = q;
        choice[i] = k;
      }
    }
    next(static_cast<Eigen::Index>(i)) = best;
  }
  if (greedy != nullptr) *greedy = StrategyProfile(std::move(choice));
  return next;
}

SolveResult value_iteration(const Game& game, double accuracy, const ValueIterationOptions& options) {
  if (!(accuracy > 0.0)) throw std::invalid_argument("value_iteration: accuracy must be positive");
  const double gamma = game.gamma();
  const double stop = accuracy * (1.0 - gamma) / (2.0 * gamma);

  SolveResult result;
  result.method = SolveMethod::kValueIteration;
  Vector v = Vector::Zero(static_cast<Eigen::Index>(game.num_states()));
  if (options.record_iterates) result.iterates.push_back(v);

  for (std::size_t t = 0;; ++t) {
    if (t >= options.max_iters) {
      throw SolverError("value_iteration: iteration cap of " + std::to_string(options.max_iters) +
                        " exceeded");
    }
    StrategyProfile greedy;
    Vector next = bellman_update(game, v, &greedy);
    const double diff = max_abs(next - v);
    v = std::move(next);
    if (options.record_iterates) result.iterates.push_back(v);
    if (diff <= stop) {
      // Greedy with respect to the final iterate.
      bellman_update(game, v, &greedy);
      result.profile = std::move(greedy);
      result.iterations = t + 1;
      break;
    }
  }
  result.values = value_vector(game, result.profile);
  return result;
}

namespace {

// Switches states owned by `mover` to their best strictly improving action.
// Returns true if anything changed.
bool improve(const Game& game, const Vector& rc, Player mover, double tol, StrategyProfile& profile) {
  bool switched = false;
  for (std::size_t i = 0; i < game.num_states(); ++i) {
    const State& s = game.state(i);
    if (s.owner != mover) continue;
    // Player 1 wants negative reduced costs, Player 2 positive.
    const double sign = mover == Player::kMin ? -1.0 : 1.0;
    std::size_t best = profile[i];
    double best_gain = 0.0;
    for (std::size_t k = 0; k < s.actions.size(); ++k) {
      const double gain = sign * rc(static_cast<Eigen::Index>(game.offset(i) + k));
      if (gain > best_gain) {
        best_gain = gain;
        best = k;
      }
    }
    if (best_gain > tol && best != profile[i]) {
      profile[i] = best;
      switched = true;
    }
  }
  return switched;
}

}  // namespace

SolveResult strategy_iteration(const Game& game, StrategyProfile initial,
                               const StrategyIterationOptions& options) {
  check_profile(game, initial);
  SolveResult result;
  result.method = SolveMethod::kStrategyIteration;
  StrategyProfile profile = std::move(initial);
  std::size_t rounds = 0;
  std::set<StrategyProfile> visited;

  auto bump = [&] {
    if (++rounds > options.max_rounds) throw SolverError("strategy_iteration: round cap exceeded");
  };

  for (;;) {
    // Best response of Player 1 against the current Player 2 strategy.
    std::set<StrategyProfile> inner_visited;
    for (;;) {
      const Vector rc = reduced_costs(game, profile);
      if (!improve(game, rc, Player::kMin, options.tol, profile)) break;
      if (!inner_visited.insert(profile).second) {
        throw SolverError("strategy_iteration: cycle detected in best response");
      }
      bump();
    }
    const Vector values = value_vector(game, profile);
    if (options.record_iterates) result.iterates.push_back(values);
    const Vector rc = reduced_costs(game, values);
    if (!improve(game, rc, Player::kMax, options.tol, profile)) {
      result.values = values;
      break;
    }
    if (!visited.insert(profile).second) {
      throw SolverError("strategy_iteration: cycle detected (profile revisited)");
    }
    bump();
  }
  result.profile = std::move(profile);
  result.iterations = rounds;
  return result;
}

SolveResult strategy_iteration(const Game& game, const StrategyIterationOptions& options) {
  return strategy_iteration(game, StrategyProfile::uniform_slot(game.num_states(), 0), options);
}

namespace {

StrategyProfile profile_at(const Game& game, std::size_t index) {
  std::vector<std::size_t> choice(game.num_states());
  for (std::size_t i = game.num_states(); i-- > 0;) {
    const std::size_t radix = game.state(i).actions.size();
    choice[i] = index % radix;
    index /= radix;
  }
  return StrategyProfile(std::move(choice));
}

std::optional<std::size_t> first_optimal(const Game& game, std::size_t begin, std::size_t end, double tol) {
  for (std::size_t k = begin; k < end; ++k) {
    if (is_optimal(game, profile_at(game, k), tol).optimal) return k;
  }
  return std::nullopt;
}

}  // namespace

SolveResult brute_force_solve(const Game& game, const BruteForceOptions& options) {
  std::size_t total = 1;
  for (const State& s : game.states()) {
    if (total > options.max_profiles / s.actions.size()) {
      throw SolverError("brute_force_solve: more than " + std::to_string(options.max_profiles) +
                        " profiles, refusing to enumerate");
    }
    total *= s.actions.size();
  }

  std::optional<std::size_t> found;
  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(total)));
  if (workers == 1) {
    found = first_optimal(game, 0, total, options.tol);
  } else {
    std::vector<std::optional<std::size_t>> hits(workers);
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(total, begin + chunk);
      pool.emplace_back([&, w, begin, end] { hits[w] = first_optimal(game, begin, end, options.tol); });
    }
    for (auto& t : pool) t.join();
    for (const auto& h : hits) {
      if (h) {
        found = h;
        break;
      }
    }
  }
  if (!found) {
    throw SolverError("brute_force_solve: no profile passes the optimality check at tol " +
                      std::to_string(options.tol) + " (numeric tolerance failure)");
  }
  SolveResult result;
  result.method = SolveMethod::kBruteForce;
  result.profile = profile_at(game, *found);
  result.values = value_vector(game, result.profile);
  result.iterations = *found + 1;
  return result;
}

}  // namespace tbsg
