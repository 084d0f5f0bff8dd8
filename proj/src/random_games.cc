#include "tbsg/random_games.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tbsg {

namespace {

constexpr std::size_t kMaxSupport = 4;

RawAction random_action(std::size_t n, Density density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> cost(-10.0, 10.0);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  RawAction action;
  action.cost = cost(rng);

  std::vector<std::size_t> support(n);
  std::iota(support.begin(), support.end(), 0);
  if (density == Density::kSparse) {
    std::uniform_int_distribution<std::size_t> size(1, std::min(kMaxSupport, n));
    const std::size_t k = size(rng);
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(support[i], support[pick(rng)]);
    }
    support.resize(k);
    std::sort(support.begin(), support.end());
  }
  std::vector<double> w(support.size());
  for (double& x : w) x = weight(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) {
    action.dist.emplace_back(static_cast<std::int64_t>(support[i]), w[i] / total);
  }
  return action;
}

}  // namespace

Game random_game(std::size_t n, double gamma, std::uint64_t seed, Density density) {
  if (n == 0) throw std::invalid_argument("random_game: n must be positive");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution owner(0.5);
  RawGame raw;
  raw.gamma = gamma;
  raw.states.resize(n);
  for (RawState& s : raw.states) {
    s.owner = owner(rng) ? 2 : 1;
    s.actions.push_back(random_action(n, density, rng));
    s.actions.push_back(random_action(n, density, rng));
  }
  return validate_game(raw);
}

}  // namespace tbsg
