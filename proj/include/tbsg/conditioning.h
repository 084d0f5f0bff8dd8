#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tbsg/lcp.h"

namespace tbsg {

// ---------------------------------------------------------------------------
// P-matrix checks

struct MinorsVerdict {
  bool pmatrix = true;
  std::uint64_t subsets_checked = 0;
  std::uint64_t failing_subset = 0;  // bitmask of the first non-positive minor
  double failing_minor = 0.0;
  double min_relative_minor = 0.0;  // min over subsets of det / scale
};

constexpr std::size_t kMaxMinorsDimension = 20;

/// Every principal minor must exceed 1e-12 times the product of the
/// submatrix row max-abs entries. Refuses n > 20.
MinorsVerdict pmatrix_check_minors(const Matrix& m);

/// Data needed to pick the index that the game structure guarantees:
/// j = argmax |((I - g P_tau)^{-1} I x)_j|.
class GameWitnessContext {
 public:
  GameWitnessContext(const Game& game, const Partition& partition);
  std::size_t preferred_index(const Vector& x) const;

 private:
  Matrix a_tau_;
  Vector ownership_;
  std::optional<LuDecomposition> lu_;
};

/// Returns some i with x_i (M x)_i > 0, or nullopt if none exists (so M is
/// not a P-matrix). Without context, the index with the largest product.
std::optional<std::size_t> pmatrix_witness_check(const Matrix& m, const Vector& x,
                                                 const GameWitnessContext* context = nullptr);

// ---------------------------------------------------------------------------
// kappa

class NotPStarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// With S+ (S-) the sum of the positive (negative) x_i (M x)_i, returns 0
/// when S+ + S- >= 0 and (-S-/S+ - 1)/4 otherwise. Throws NotPStarError if
/// S+ = 0 < -S-.
double kappa_at(const Matrix& m, const Vector& x);

struct Estimate {
  double value = 0.0;
  Vector witness;
};

struct SamplingOptions {
  std::size_t samples = 10'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t hill_climb_rounds = 100;
};

/// Lower bound on kappa(M): max of kappa_at over the given witnesses,
/// standard-normal samples, and coordinate hill-climbing from the best point.
Estimate estimate_kappa(const Matrix& m, const SamplingOptions& options,
                        const std::vector<Vector>& witnesses = {});

double kappa_global_upper(std::size_t n, double gamma);  // n / (1 - gamma)^2

// ---------------------------------------------------------------------------
// delta

struct SmallestEigen {
  double value = 0.0;
  Vector vector;
  double residual = 0.0;  // ||A v - delta v||_inf
};

/// Smallest eigenvalue of (M + M^T)/2 by cyclic Jacobi.
SmallestEigen smallest_eigenvalue_sym(const Matrix& m);

double delta_global_lower(std::size_t n, double gamma);  // -(1 + gamma) sqrt(n) / (1 - gamma)

// ---------------------------------------------------------------------------
// theta

/// max_i x_i (M x)_i for x scaled to unit 2-norm.
double theta_at(const Matrix& m, const Vector& x);

/// Upper bound on theta(M): min of theta_at over the given witnesses,
/// uniform samples on the sphere, and coordinate hill-climbing.
Estimate estimate_theta(const Matrix& m, const SamplingOptions& options,
                        const std::vector<Vector>& witnesses = {});

double theta_global_lower(std::size_t n, double gamma);  // (1 - gamma)^2 / ((1 + gamma)^2 n)

// ---------------------------------------------------------------------------
// report

enum class PMatrixVerdict { kCertifiedByMinors, kWitnessSampled, kFailed };

std::string_view verdict_name(PMatrixVerdict v);

struct ConditioningOptions {
  SamplingOptions sampling;
  std::vector<Vector> kappa_witnesses;
  std::vector<Vector> theta_witnesses;
};

struct ConditioningReport {
  std::size_t n = 0;
  double gamma = 0.0;

  double kappa_estimate = 0.0;  // lower bound on kappa(M)
  Vector kappa_witness;
  double kappa_global_upper = 0.0;

  double delta = 0.0;
  Vector delta_eigenvector;
  double delta_global_lower = 0.0;

  double theta_estimate = 0.0;  // upper bound on theta(M)
  Vector theta_witness;
  double theta_global_lower = 0.0;

  PMatrixVerdict pmatrix = PMatrixVerdict::kFailed;
  std::string pmatrix_detail;

  std::size_t samples = 0;
  std::uint64_t seed = 0;

  double condition_number() const { return -delta / theta_estimate; }
  // Symbolic running-time expressions; L (bit size) is left as a symbol.
  std::string unified_ipm_runtime() const;
  std::string potential_reduction_runtime() const;
};

ConditioningReport certify(const Game& game, const Partition& partition, const ConditioningOptions& options);

}  // namespace tbsg
