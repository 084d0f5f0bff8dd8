#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tbsg/hard_instances.h"

namespace tbsg {

struct BenchConfig {
  std::vector<std::size_t> ns;
  std::vector<double> gammas;
  AMode mode = AMode::kKappa;
  std::size_t repetitions = 1;  // sampling restarts per cell, seeds seed + rep
  std::uint64_t seed = 0;
  std::size_t samples = 2'000;
  std::size_t hill_climb_rounds = 100;
  unsigned threads = 1;  // cells run in parallel
  bool run_solver = true;  // solve the LCP by potential reduction, report iterations
};

struct BenchRow {
  std::size_t n = 0;
  double gamma = 0.0;
  AMode mode = AMode::kKappa;
  double kappa_est = 0.0;
  double kappa_ub = 0.0;
  double kappa_lb_pred = 0.0;
  double delta = 0.0;
  double delta_lb = 0.0;
  double delta_ub_pred = 0.0;
  double theta_est = 0.0;
  double theta_lb = 0.0;
  double theta_ub_pred = 0.0;
  double cond = 0.0;
  std::size_t solver_iters = 0;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" or "error: <message>"
};

/// Computes one cell on G_n. The c_tau vectors of the kappa and theta
/// instances are always included as witnesses (M does not depend on a).
BenchRow bench_cell(std::size_t n, double gamma, const BenchConfig& config);

/// Runs every (n, gamma) cell, n-major. `on_row` receives rows in that
/// order as soon as each prefix is complete. Throws std::invalid_argument
/// on an empty range; failing cells are reported through the status column.
std::vector<BenchRow> run_bench(const BenchConfig& config,
                                const std::function<void(const BenchRow&)>& on_row = {});

std::string bench_csv_header();
/// `with_timing = false` writes wall_ms as 0 so reruns compare byte for byte.
std::string bench_csv_row(const BenchRow& row, bool with_timing = true);
std::vector<BenchRow> read_bench_csv(std::istream& in);

/// Least-squares slope of log y against log x. Requires positive data.
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

struct PlotSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

/// Log-log line chart; each legend entry carries the fitted slope.
std::string loglog_svg(const std::vector<PlotSeries>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label);

enum class PlotQuantity { kKappa, kNegDelta, kInvTheta };
PlotQuantity parse_plot_quantity(const std::string& name);  // kappa | delta | theta
double plot_value(const BenchRow& row, PlotQuantity q);
/// One series per gamma, x = n.
std::vector<PlotSeries> series_by_gamma(const std::vector<BenchRow>& rows, PlotQuantity q);

}  // namespace tbsg
