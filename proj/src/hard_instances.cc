#include "tbsg/hard_instances.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tbsg {

namespace {

void check_n_gamma(std::size_t n, double gamma) {
  if (n <= 2) throw std::invalid_argument("G_n needs n > 2, got n = " + std::to_string(n));
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
}

double mode_a(std::size_t n, double gamma, AMode mode, double custom_a) {
  switch (mode) {
    case AMode::kKappa: return gamma / (1.0 - gamma);
    case AMode::kEigenvalue: return std::sqrt(2.0 / static_cast<double>(n - 2));
    case AMode::kTheta: return 2.0 * gamma / (1.0 - gamma);
    case AMode::kCustom: return custom_a;
  }
  return custom_a;
}

}  // namespace

std::string_view a_mode_name(AMode mode) {
  switch (mode) {
    case AMode::kKappa: return "kappa";
    case AMode::kEigenvalue: return "eigenvalue";
    case AMode::kTheta: return "theta";
    case AMode::kCustom: return "custom";
  }
  return "custom";
}

AMode parse_a_mode(std::string_view name) {
  if (name == "kappa") return AMode::kKappa;
  if (name == "eigenvalue") return AMode::kEigenvalue;
  if (name == "theta") return AMode::kTheta;
  if (name == "custom") return AMode::kCustom;
  throw std::invalid_argument("unknown a-mode '" + std::string(name) + "'");
}

GnSpec make_gn_spec(std::size_t n, double gamma, AMode mode, double custom_a) {
  check_n_gamma(n, gamma);
  GnSpec spec{n, gamma, mode_a(n, gamma, mode, custom_a), mode};
  check_gn_spec(spec);
  return spec;
}

void check_gn_spec(const GnSpec& spec) {
  check_n_gamma(spec.n, spec.gamma);
  if (!std::isfinite(spec.a)) throw std::invalid_argument("G_n cost parameter must be finite");
  if (spec.mode != AMode::kCustom) {
    const double expected = mode_a(spec.n, spec.gamma, spec.mode, 0.0);
    if (std::abs(spec.a - expected) > 1e-12 * (1.0 + std::abs(expected))) {
      throw std::invalid_argument("a = " + std::to_string(spec.a) + " does not match a-mode " +
                                  std::string(a_mode_name(spec.mode)));
    }
  }
}

GnInstance build_gn(const GnSpec& spec) {
  check_gn_spec(spec);
  RawGame raw;
  raw.gamma = spec.gamma;
  raw.states.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    RawState& s = raw.states[i];
    s.owner = 2;
    if (i < 2) {
      const double cost = i == 0 ? 1.0 : -1.0;
      const RawAction loop{cost, {{static_cast<std::int64_t>(i), 1.0}}};
      s.actions = {loop, loop};
    } else {
      s.actions = {RawAction{spec.a, {{0, 1.0}}}, RawAction{spec.a, {{1, 1.0}}}};
    }
  }
  return {validate_game(raw),
          {StrategyProfile::uniform_slot(spec.n, 0), StrategyProfile::uniform_slot(spec.n, 1)}};
}

GnClosedForms closed_forms(const GnSpec& spec) {
  check_gn_spec(spec);
  const auto n = static_cast<Eigen::Index>(spec.n);
  const double g = spec.gamma;
  const double a = spec.a;
  const double h = g / (1.0 - g);
  GnClosedForms f;
  f.c_tau = Vector::Constant(n, a);
  f.v = Vector::Constant(n, a - h);
  f.r = Vector::Constant(n, a - 2.0 * h);
  f.r_prime = Vector::Constant(n, a * a - 2.0 * h * a);
  f.c_tau.head(2) << 1.0, -1.0;
  f.v.head(2) << 1.0 / (1.0 - g), -1.0 / (1.0 - g);
  f.r.head(2) << 1.0, -1.0;
  f.r_prime.head(2) << 1.0, 1.0;
  return f;
}

Vector gn_optimal_values(const GnSpec& spec) {
  check_gn_spec(spec);
  const double g = spec.gamma;
  Vector v = Vector::Constant(static_cast<Eigen::Index>(spec.n), spec.a + g / (1.0 - g));
  v.head(2) << 1.0 / (1.0 - g), -1.0 / (1.0 - g);
  return v;
}

double predicted_kappa_lb(std::size_t n, double gamma) {
  check_n_gamma(n, gamma);
  const double h = gamma / (1.0 - gamma);
  return static_cast<double>(n - 2) / 8.0 * h * h - 0.25;
}

double predicted_eig_ub(std::size_t n, double gamma) {
  check_n_gamma(n, gamma);
  return 1.0 - gamma * std::sqrt(static_cast<double>(n - 2)) / (std::sqrt(2.0) * (1.0 - gamma));
}

double predicted_theta_ub(std::size_t n, double gamma) {
  check_n_gamma(n, gamma);
  return (1.0 - gamma) * (1.0 - gamma) / (4.0 * gamma * gamma * static_cast<double>(n - 2));
}

double gn_theta_witness_value(std::size_t n, double a) {
  if (n <= 2) throw std::invalid_argument("G_n needs n > 2");
  return 1.0 / (2.0 + static_cast<double>(n - 2) * a * a);
}

}  // namespace tbsg
