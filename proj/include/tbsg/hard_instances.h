#pragma once

#include <cstddef>
#include <string_view>

#include "tbsg/lcp.h"

namespace tbsg {

/// How the cost parameter a of G_n is chosen. Each of the first three modes
/// makes c_tau the extremal witness for one conditioning quantity.
enum class AMode { kKappa, kEigenvalue, kTheta, kCustom };

std::string_view a_mode_name(AMode mode);
AMode parse_a_mode(std::string_view name);  // throws std::invalid_argument

struct GnSpec {
  std::size_t n = 3;
  double gamma = 0.5;
  double a = 1.0;
  AMode mode = AMode::kCustom;
};

/// a = g/(1-g) for kKappa, sqrt(2/(n-2)) for kEigenvalue, 2g/(1-g) for kTheta;
/// `custom_a` is used only for kCustom.
GnSpec make_gn_spec(std::size_t n, double gamma, AMode mode, double custom_a = 1.0);

/// Throws std::invalid_argument unless n > 2, gamma in (0,1), a finite and
/// consistent with the mode.
void check_gn_spec(const GnSpec& spec);

struct GnInstance {
  Game game;
  Partition partition;
};

/// All states belong to Player 2 and every action is deterministic. States 0
/// and 1 carry two identical self-loops with cost 1 and -1. Every other state
/// has slot 0 -> state 0 (sigma) and slot 1 -> state 1 (tau), both with cost a.
GnInstance build_gn(const GnSpec& spec);

struct GnClosedForms {
  Vector c_tau;    // (1, -1, a, ...)
  Vector v;        // value vector of tau
  Vector r;        // M c_tau
  Vector r_prime;  // c_tau o M c_tau
};

GnClosedForms closed_forms(const GnSpec& spec);

/// Optimal values (sigma is optimal for a >= 0): (1/(1-g), -1/(1-g), a + g/(1-g), ...).
Vector gn_optimal_values(const GnSpec& spec);

/// (n-2)/8 (g/(1-g))^2 - 1/4, possibly negative.
double predicted_kappa_lb(std::size_t n, double gamma);
inline double predicted_kappa_lb_clamped(std::size_t n, double gamma) {
  const double v = predicted_kappa_lb(n, gamma);
  return v > 0.0 ? v : 0.0;
}
/// 1 - g sqrt(n-2) / (sqrt(2) (1-g)).
double predicted_eig_ub(std::size_t n, double gamma);
/// (1-g)^2 / ((2g)^2 (n-2)).
double predicted_theta_ub(std::size_t n, double gamma);

/// theta_at(M, c_tau) for the theta-mode instance: 1 / (2 + (n-2) a^2).
double gn_theta_witness_value(std::size_t n, double a);

}  // namespace tbsg
