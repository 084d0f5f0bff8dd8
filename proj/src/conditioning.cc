#include "tbsg/conditioning.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace tbsg {

// ---------------------------------------------------------------------------
// P-matrix checks

MinorsVerdict pmatrix_check_minors(const Matrix& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("pmatrix_check_minors: matrix must be square");
  if (static_cast<std::size_t>(n) > kMaxMinorsDimension) {
    throw std::invalid_argument("pmatrix_check_minors: n = " + std::to_string(n) +
                                " exceeds the limit of 20 (2^n - 1 minors)");
  }
  MinorsVerdict verdict;
  verdict.min_relative_minor = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> idx;
  const std::uint64_t subsets = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t mask = 1; mask <= subsets; ++mask) {
    idx.clear();
    for (Eigen::Index i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i)) idx.push_back(i);
    const auto k = static_cast<Eigen::Index>(idx.size());
    Matrix sub(k, k);
    double scale = 1.0;
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c < k; ++c) sub(r, c) = m(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
      scale *= std::max(sub.row(r).cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    }
    const double det = LuDecomposition(sub).determinant();
    ++verdict.subsets_checked;
    verdict.min_relative_minor = std::min(verdict.min_relative_minor, det / scale);
    if (!(det > 1e-12 * scale)) {
      verdict.pmatrix = false;
      verdict.failing_subset = mask;
      verdict.failing_minor = det;
      break;
    }
  }
  return verdict;
}

GameWitnessContext::GameWitnessContext(const Game& game, const Partition& partition) {
  check_partition(game, partition);
  const MatrixRep rep = matrix_representation(game);
  const Restriction t = restrict(rep, game, partition.tau);
  const auto n = t.P.rows();
  a_tau_ = Matrix::Identity(n, n) - game.gamma() * t.P;
  ownership_ = rep.ownership;
  lu_.emplace(a_tau_);
}

std::size_t GameWitnessContext::preferred_index(const Vector& x) const {
  const Vector v = lu_->solve(Vector(ownership_.cwiseProduct(x)));
  Eigen::Index j = 0;
  v.cwiseAbs().maxCoeff(&j);
  return static_cast<std::size_t>(j);
}

std::optional<std::size_t> pmatrix_witness_check(const Matrix& m, const Vector& x, const GameWitnessContext* context) {
  const Vector prod = x.cwiseProduct(m * x);
  if (context != nullptr) {
    const std::size_t j = context->preferred_index(x);
    if (prod(static_cast<Eigen::Index>(j)) > 0.0) return j;
  }
  Eigen::Index best = 0;
  const double top = prod.maxCoeff(&best);
  if (top > 0.0) return static_cast<std::size_t>(best);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sampling machinery shared by kappa and theta.

namespace {

struct SignedSums {
  double pos = 0.0;
  double neg = 0.0;
};

SignedSums signed_sums(const Vector& x, const Vector& mx) {
  SignedSums s;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double p = x(i) * mx(i);
    if (p > 0.0) s.pos += p;
    else if (p < 0.0) s.neg += p;
  }
  return s;
}

double kappa_from(const Vector& x, const Vector& mx) {
  const SignedSums s = signed_sums(x, mx);
  if (s.pos + s.neg >= 0.0) return 0.0;
  if (s.pos == 0.0) {
    throw NotPStarError("kappa_at: every nonzero x_i (Mx)_i is negative; M is not a P*-matrix");
  }
  return (-s.neg / s.pos - 1.0) / 4.0;
}

double theta_from(const Vector& x, const Vector& mx) {
  return x.cwiseProduct(mx).maxCoeff() / x.squaredNorm();
}

// Objective to maximize; theta is handled by negation.
using Objective = std::function<double(const Vector& x, const Vector& mx)>;

struct Candidate {
  double score = -std::numeric_limits<double>::infinity();
  Vector x;
};

Candidate sample_best(const Matrix& m, const SamplingOptions& options, const Objective& objective) {
  const unsigned workers = std::max(1u, options.threads);
  const std::size_t total = options.samples;
  const auto n = m.rows();
  std::vector<Candidate> best(workers);
  auto run = [&](unsigned w) {
    const std::size_t begin = total * w / workers;
    const std::size_t end = total * (w + 1) / workers;
    std::mt19937_64 rng(options.seed + w);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector x(n);
    for (std::size_t s = begin; s < end; ++s) {
      for (Eigen::Index i = 0; i < n; ++i) x(i) = normal(rng);
      if (x.squaredNorm() == 0.0) continue;
      const double score = objective(x, m * x);
      if (score > best[w].score) best[w] = {score, x};
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  Candidate out;
  for (const Candidate& c : best) {
    if (c.x.size() > 0 && c.score > out.score) out = c;
  }
  return out;
}

// Coordinate moves of size `step` in both directions; the step halves after
// a round without improvement. M x is updated incrementally.
Candidate hill_climb(const Matrix& m, Candidate start, std::size_t rounds, const Objective& objective) {
  if (start.x.size() == 0 || rounds == 0) return start;
  Vector x = start.x;
  Vector mx = m * x;
  double score = objective(x, mx);
  double step = 0.5 * max_abs(x);
  Vector trial_mx(mx.size());
  for (std::size_t round = 0; round < rounds; ++round) {
    bool improved = false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      for (double sign : {1.0, -1.0}) {
        const double delta = sign * step;
        const double xi = x(i);
        x(i) = xi + delta;
        if (x.squaredNorm() == 0.0) {
          x(i) = xi;
          continue;
        }
        trial_mx = mx + delta * m.col(i);
        const double trial = objective(x, trial_mx);
        if (trial > score) {
          score = trial;
          mx = trial_mx;
          improved = true;
        } else {
          x(i) = xi;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {score, x};
}

Candidate best_of(const Matrix& m, const SamplingOptions& options, const std::vector<Vector>& witnesses,
                  const Objective& objective) {
  Candidate best;
  for (const Vector& w : witnesses) {
    if (w.size() != m.rows() || w.squaredNorm() == 0.0) {
      throw std::invalid_argument("witness vector must be nonzero with matching dimension");
    }
    const double score = objective(w, m * w);
    if (score > best.score) best = {score, w};
  }
  Candidate sampled = sample_best(m, options, objective);
  if (sampled.score > best.score) best = sampled;
  Candidate climbed = hill_climb(m, sampled, options.hill_climb_rounds, objective);
  if (climbed.score > best.score) best = climbed;
  return best;
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
}

void check_n(std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be positive");
}

}  // namespace

// ---------------------------------------------------------------------------
// kappa

double kappa_at(const Matrix& m, const Vector& x) {
  if (x.squaredNorm() == 0.0) throw std::invalid_argument("kappa_at: x must be nonzero");
  return kappa_from(x, m * x);
}

Estimate estimate_kappa(const Matrix& m, const SamplingOptions& options, const std::vector<Vector>& witnesses) {
  if (options.samples == 0) throw std::invalid_argument("estimate_kappa: need at least one sample");
  const Candidate best = best_of(m, options, witnesses, kappa_from);
  return {best.score, best.x};
}

double kappa_global_upper(std::size_t n, double gamma) {
  check_gamma(gamma);
  return static_cast<double>(n) / ((1.0 - gamma) * (1.0 - gamma));
}

// ---------------------------------------------------------------------------
// delta

SmallestEigen smallest_eigenvalue_sym(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("smallest_eigenvalue_sym: matrix must be square");
  const Matrix a = 0.5 * (m + m.transpose());
  const SymmetricEigen eig = jacobi_eigen(a, 1e-12);
  SmallestEigen out;
  out.value = eig.values(0);
  out.vector = eig.vectors.col(0);
  out.residual = max_abs(a * out.vector - out.value * out.vector);
  return out;
}

double delta_global_lower(std::size_t n, double gamma) {
  check_gamma(gamma);
  check_n(n);
  return -(1.0 + gamma) * std::sqrt(static_cast<double>(n)) / (1.0 - gamma);
}

// ---------------------------------------------------------------------------
// theta

double theta_at(const Matrix& m, const Vector& x) {
  if (x.squaredNorm() == 0.0) throw std::invalid_argument("theta_at: x must be nonzero");
  const Vector u = x.normalized();
  return theta_from(u, m * u);
}

Estimate estimate_theta(const Matrix& m, const SamplingOptions& options, const std::vector<Vector>& witnesses) {
  if (options.samples == 0) throw std::invalid_argument("estimate_theta: need at least one sample");
  const Objective negated = [](const Vector& x, const Vector& mx) { return -theta_from(x, mx); };
  const Candidate best = best_of(m, options, witnesses, negated);
  return {-best.score, best.x.normalized()};
}

double theta_global_lower(std::size_t n, double gamma) {
  check_gamma(gamma);
  check_n(n);
  return (1.0 - gamma) * (1.0 - gamma) / ((1.0 + gamma) * (1.0 + gamma) * static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// report

std::string_view verdict_name(PMatrixVerdict v) {
  switch (v) {
    case PMatrixVerdict::kCertifiedByMinors: return "certified-by-minors";
    case PMatrixVerdict::kWitnessSampled: return "witness-sampled";
    case PMatrixVerdict::kFailed: return "failed";
  }
  return "unknown";
}

std::string ConditioningReport::unified_ipm_runtime() const {
  std::ostringstream os;
  os << "O((1+kappa)*n^3.5*L) with kappa >= " << kappa_estimate << ": coefficient "
     << (1.0 + kappa_estimate) * std::pow(static_cast<double>(n), 3.5) << " * L";
  return os.str();
}

std::string ConditioningReport::potential_reduction_runtime() const {
  std::ostringstream os;
  os << "O((-delta/theta)*n^4*log(1/eps)): coefficient "
     << condition_number() * std::pow(static_cast<double>(n), 4.0) << " * log(1/eps)";
  return os.str();
}

ConditioningReport certify(const Game& game, const Partition& partition, const ConditioningOptions& options) {
  const Lcp lcp = reduce(game, partition);
  const Matrix& m = lcp.M;
  ConditioningReport report;
  report.n = game.num_states();
  report.gamma = game.gamma();
  report.samples = options.sampling.samples;
  report.seed = options.sampling.seed;

  if (report.n <= kMaxMinorsDimension) {
    const MinorsVerdict v = pmatrix_check_minors(m);
    std::ostringstream os;
    if (v.pmatrix) {
      report.pmatrix = PMatrixVerdict::kCertifiedByMinors;
      os << v.subsets_checked << " principal minors positive; min relative minor " << v.min_relative_minor;
    } else {
      report.pmatrix = PMatrixVerdict::kFailed;
      os << "principal minor for subset mask " << v.failing_subset << " is " << v.failing_minor;
    }
    report.pmatrix_detail = os.str();
  } else {
    const GameWitnessContext context(game, partition);
    std::mt19937_64 rng(options.sampling.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector x(m.rows());
    std::size_t passed = 0;
    for (std::size_t s = 0; s < options.sampling.samples; ++s) {
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
      if (pmatrix_witness_check(m, x, &context)) ++passed;
    }
    report.pmatrix = passed == options.sampling.samples ? PMatrixVerdict::kWitnessSampled : PMatrixVerdict::kFailed;
    report.pmatrix_detail = std::to_string(passed) + " of " + std::to_string(options.sampling.samples) +
                            " sampled x have an index with x_i (Mx)_i > 0 (evidence, not a proof)";
  }

  const Estimate kappa = estimate_kappa(m, options.sampling, options.kappa_witnesses);
  report.kappa_estimate = kappa.value;
  report.kappa_witness = kappa.witness;
  report.kappa_global_upper = kappa_global_upper(report.n, report.gamma);

  const SmallestEigen eig = smallest_eigenvalue_sym(m);
  report.delta = eig.value;
  report.delta_eigenvector = eig.vector;
  report.delta_global_lower = delta_global_lower(report.n, report.gamma);

  const Estimate theta = estimate_theta(m, options.sampling, options.theta_witnesses);
  report.theta_estimate = theta.value;
  report.theta_witness = theta.witness;
  report.theta_global_lower = theta_global_lower(report.n, report.gamma);
  return report;
}

}  // namespace tbsg
