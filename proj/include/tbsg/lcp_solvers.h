#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tbsg/lcp.h"

namespace tbsg {

struct IpmOptions {
  double epsilon = 1e-9;          // target complementarity gap w^T z
  std::optional<double> rho;      // potential weight, defaults to n + sqrt(n)
  std::size_t max_iters = 10'000;
  double backtrack = 0.5;
  double step_fraction = 0.99;    // fraction of the largest positivity-preserving step
  double homotopy_shrink = 0.1;
  std::uint64_t seed = 0;         // the method is deterministic; recorded for provenance
};

struct IpmIterate {
  std::size_t iter = 0;
  double gap = 0.0;        // w^T z after the step
  double potential = 0.0;  // rho ln(w^T z) - sum ln(w_i z_i) after the step
  double step = 0.0;
  double shift = 0.0;      // homotopy shift t in q + t 1
  double direction_residual = 0.0;  // ||dw - M dz||_inf
};

enum class IpmTermination { kConverged, kMaxIterations, kLineSearchStall, kSingularDirection };

std::string_view termination_name(IpmTermination t);

/// One record per accepted potential-reduction step. Homotopy moves (shift
/// changes) are counted separately; the potential is only comparable
/// between records with the same shift.
struct IpmTrace {
  std::vector<IpmIterate> records;
  std::size_t homotopy_steps = 0;
  IpmTermination termination = IpmTermination::kConverged;
};

struct IpmSolution {
  Vector w;
  Vector z;
  double shift = 0.0;  // w = q + shift * 1 + M z
  double rho = 0.0;
  IpmTrace trace;
  std::size_t iterations() const { return trace.records.size() + trace.homotopy_steps; }
};

class IpmFailure : public std::runtime_error {
 public:
  IpmFailure(const std::string& what, IpmTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const IpmTrace& trace() const { return trace_; }

 private:
  IpmTrace trace_;
};

/// Primal-dual potential reduction for P-matrix LCPs.
///
/// Starts from z = 1 on the shifted problem q + t 1 with
/// t = max(0, 1 - min(q + M 1)), so w > 0. Each step solves
///   dw = M dz,   z o dw + w o dz = (w^T z / rho) 1 - w o z
/// and backtracks from `step_fraction` of the largest positivity-preserving
/// step until the potential rho ln(w^T z) - sum ln(w_i z_i) decreases. Once
/// w^T z <= n t, one Newton step scales both the shift and the gap by
/// `homotopy_shrink` (ratio-tested, so possibly partial) and aims at the
/// central point of the new shifted problem. Finishes when the shift is
/// <= 1e-3 epsilon and w^T z < epsilon; the returned point is strictly
/// interior.
IpmSolution solve_potential_reduction(const Lcp& lcp, const IpmOptions& options = {});

/// CSV with header iter,gap,potential,step,shift.
void write_trace_csv(std::ostream& out, const IpmTrace& trace);

struct PivotingOptions {
  std::size_t max_pivots = 100'000;
  double pivot_tol = 1e-12;
};

struct PivotingSolution {
  Vector w;
  Vector z;
  std::size_t pivots = 0;
  std::vector<bool> z_basic;  // z_i basic (w_i nonbasic) in the final basis
};

class PivotingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complementary pivoting with covering vector of ones and a lexicographic
/// ratio test. Basic values are recomputed from the original data at the
/// end, and nonbasic variables are exactly zero.
PivotingSolution solve_pivoting(const Lcp& lcp, const PivotingOptions& options = {});

/// Sets entries in (-tol, 0) to zero.
void clamp_dust(Vector& v, double tol);

struct LcpSolveOptions {
  double verify_tol = 1e-6;
  IpmOptions ipm;
  PivotingOptions pivoting;
};

/// reduce -> solve (ipm or pivot) -> clamp -> recover.
SolveResult solve_via_lcp(const Game& game, const Partition& partition, SolveMethod method,
                          const LcpSolveOptions& options = {}, IpmTrace* trace_out = nullptr);

}  // namespace tbsg
