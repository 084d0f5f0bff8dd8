#include "tbsg/game.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tbsg {

namespace {

constexpr double kDistributionTol = 1e-12;
constexpr double kValueResidualTol = 1e-9;

[[noreturn]] void reject(const std::string& what, std::size_t state, std::size_t slot) {
  std::ostringstream os;
  os << what << " (state " << state << ", action slot " << slot << ")";
  throw GameValidationError(os.str());
}

}  // namespace

std::size_t Game::action_index(std::size_t state, std::size_t slot) const {
  if (slot >= states_.at(state).actions.size()) {
    throw std::out_of_range("Game::action_index: slot out of range");
  }
  return offsets_[state] + slot;
}

const Action& Game::action(std::size_t a) const {
  const std::size_t i = action_state_.at(a);
  return states_[i].actions[a - offsets_[i]];
}

RawGame Game::to_raw() const {
  RawGame raw;
  raw.gamma = gamma_;
  for (const State& s : states_) {
    RawState rs;
    rs.owner = static_cast<int>(s.owner);
    for (const Action& a : s.actions) {
      RawAction ra;
      ra.cost = a.cost;
      for (const Transition& t : a.dist) {
        ra.dist.emplace_back(static_cast<std::int64_t>(t.state), t.probability);
      }
      rs.actions.push_back(std::move(ra));
    }
    raw.states.push_back(std::move(rs));
  }
  return raw;
}

Game validate_game(const RawGame& raw) {
  if (!(raw.gamma > 0.0 && raw.gamma < 1.0)) {
    throw GameValidationError("discount out of range: gamma must lie in (0,1)");
  }
  if (raw.states.empty()) {
    throw GameValidationError("empty state list");
  }
  const auto n = static_cast<std::int64_t>(raw.states.size());

  Game g;
  g.gamma_ = raw.gamma;
  for (std::size_t i = 0; i < raw.states.size(); ++i) {
    const RawState& rs = raw.states[i];
    if (rs.owner != 1 && rs.owner != 2) {
      reject("bad owner: must be 1 or 2", i, 0);
    }
    if (rs.actions.empty()) {
      reject("empty action list", i, 0);
    }
    State s;
    s.owner = static_cast<Player>(rs.owner);
    g.offsets_.push_back(g.action_state_.size());
    for (std::size_t k = 0; k < rs.actions.size(); ++k) {
      const RawAction& ra = rs.actions[k];
      if (!std::isfinite(ra.cost)) reject("non-finite cost", i, k);
      if (ra.dist.empty()) reject("distribution sum: empty distribution", i, k);
      Action a;
      a.cost = ra.cost;
      double sum = 0.0;
      for (const auto& [target, p] : ra.dist) {
        if (target < 0 || target >= n) reject("dangling state index", i, k);
        if (!(p >= 0.0) || !std::isfinite(p)) reject("negative probability", i, k);
        sum += p;
        a.dist.push_back({static_cast<std::size_t>(target), p});
      }
      if (std::abs(sum - 1.0) > kDistributionTol) {
        std::ostringstream os;
        os << "distribution sum " << sum << " differs from 1";
        reject(os.str(), i, k);
      }
      s.actions.push_back(std::move(a));
      g.action_state_.push_back(i);
    }
    g.states_.push_back(std::move(s));
  }
  return g;
}

void check_profile(const Game& game, const StrategyProfile& profile) {
  if (profile.size() != game.num_states()) {
    throw std::invalid_argument("strategy profile length does not match the state count");
  }
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i] >= game.state(i).actions.size()) {
      throw std::invalid_argument("strategy profile picks a missing action slot at state " +
                                  std::to_string(i));
    }
  }
}

std::vector<std::size_t> chosen_actions(const Game& game, const StrategyProfile& profile) {
  check_profile(game, profile);
  std::vector<std::size_t> out(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) out[i] = game.offset(i) + profile[i];
  return out;
}

MatrixRep matrix_representation(const Game& game) {
  const auto n = static_cast<Eigen::Index>(game.num_states());
  const auto m = static_cast<Eigen::Index>(game.num_actions());
  MatrixRep rep{Matrix::Zero(m, n), Vector::Zero(m), Matrix::Zero(m, n), Vector::Zero(n)};
  for (Eigen::Index a = 0; a < m; ++a) {
    const Action& act = game.action(static_cast<std::size_t>(a));
    for (const Transition& t : act.dist) rep.P(a, static_cast<Eigen::Index>(t.state)) += t.probability;
    rep.c(a) = act.cost;
    rep.J(a, static_cast<Eigen::Index>(game.state_of_action(static_cast<std::size_t>(a)))) = 1.0;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    rep.ownership(i) = game.state(static_cast<std::size_t>(i)).owner == Player::kMin ? -1.0 : 1.0;
  }
  return rep;
}

Restriction restrict(const MatrixRep& rep, const Game& game, const StrategyProfile& profile) {
  const std::vector<std::size_t> rows = chosen_actions(game, profile);
  const auto n = static_cast<Eigen::Index>(rows.size());
  Restriction r{Matrix(n, rep.P.cols()), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto a = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
    r.P.row(i) = rep.P.row(a);
    r.c(i) = rep.c(a);
  }
  return r;
}

Restriction restrict(const Game& game, const StrategyProfile& profile) {
  return restrict(matrix_representation(game), game, profile);
}

Vector markov_step_distribution(const Matrix& p_sigma, std::size_t start, std::size_t t) {
  const auto n = p_sigma.rows();
  if (static_cast<Eigen::Index>(start) >= n) {
    throw std::out_of_range("markov_step_distribution: start state out of range");
  }
  Eigen::RowVectorXd dist = Eigen::RowVectorXd::Zero(n);
  dist(static_cast<Eigen::Index>(start)) = 1.0;
  for (std::size_t step = 0; step < t; ++step) dist = dist * p_sigma;
  return dist.transpose();
}

Vector value_vector(const Game& game, const StrategyProfile& profile) {
  const Restriction r = restrict(game, profile);
  const auto n = r.P.rows();
  const Matrix a = Matrix::Identity(n, n) - game.gamma() * r.P;
  const LuDecomposition lu(a);
  Vector v;
  try {
    v = lu.solve(r.c);
  } catch (const SingularMatrixError& e) {
    throw NumericFailure(std::string("value_vector: ") + e.what());
  }
  const double residual = max_abs(v - r.c - game.gamma() * (r.P * v));
  if (residual > kValueResidualTol * (1.0 + max_abs(v))) {
    throw NumericFailure("value_vector: residual " + std::to_string(residual) +
                         " exceeds tolerance");
  }
  return v;
}

Vector reduced_costs(const Game& game, const Vector& values) {
  if (static_cast<std::size_t>(values.size()) != game.num_states()) {
    throw std::invalid_argument("reduced_costs: value vector has the wrong length");
  }
  Vector out(static_cast<Eigen::Index>(game.num_actions()));
  for (std::size_t a = 0; a < game.num_actions(); ++a) {
    const Action& act = game.action(a);
    double expected = 0.0;
    for (const Transition& t : act.dist) expected += t.probability * values(static_cast<Eigen::Index>(t.state));
    out(static_cast<Eigen::Index>(a)) =
        act.cost + game.gamma() * expected - values(static_cast<Eigen::Index>(game.state_of_action(a)));
  }
  return out;
}

Vector reduced_costs(const Game& game, const StrategyProfile& profile) {
  return reduced_costs(game, value_vector(game, profile));
}

OptimalityReport is_optimal(const Game& game, const StrategyProfile& profile, double tol) {
  const Vector rc = reduced_costs(game, profile);
  OptimalityReport report;
  for (std::size_t a = 0; a < game.num_actions(); ++a) {
    const double c = rc(static_cast<Eigen::Index>(a));
    const Player owner = game.state(game.state_of_action(a)).owner;
    // Violation is the amount by which the sign condition fails.
    const double violation = owner == Player::kMin ? -c : c;
    if (violation > tol) {
      report.optimal = false;
      report.violating_actions.push_back(a);
      report.max_violation = std::max(report.max_violation, violation);
    }
  }
  return report;
}

}  // namespace tbsg
