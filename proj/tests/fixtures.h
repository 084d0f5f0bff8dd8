#pragma once

#include <ostream>

#include "tbsg/game.h"
#include "tbsg/hard_instances.h"

namespace tbsg::testing {

// The three-state example with S1 = {1} (0-based), actions a1..a6 in
// (state, slot) order.
inline Game example_game(double gamma = 0.5) {
  RawGame raw;
  raw.gamma = gamma;
  raw.states = {
      {2, {{7.0, {{1, 0.5}, {2, 0.5}}}, {3.0, {{0, 1.0}}}}},
      {1, {{-4.0, {{0, 1.0}}}, {2.0, {{0, 0.5}, {1, 0.25}, {2, 0.25}}}}},
      {2, {{5.0, {{1, 1.0}}}, {-10.0, {{1, 1.0 / 3.0}, {2, 2.0 / 3.0}}}}},
  };
  return validate_game(raw);
}

// sigma = {a1, a4, a5}
inline StrategyProfile example_sigma() { return StrategyProfile({0, 1, 0}); }

inline GnInstance g3() { return build_gn(make_gn_spec(3, 0.5, AMode::kCustom, 1.0)); }

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace tbsg::testing

namespace tbsg {
// Readable failure messages for profile comparisons.
inline void PrintTo(const StrategyProfile& p, std::ostream* os) {
  *os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) *os << (i ? "," : "") << p[i];
  *os << ")";
}
}  // namespace tbsg
