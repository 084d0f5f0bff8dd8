#include "tbsg/bench.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <istream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tbsg/conditioning.h"
#include "tbsg/game_io.h"
#include "tbsg/lcp_solvers.h"

namespace tbsg {

BenchRow bench_cell(std::size_t n, double gamma, const BenchConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  BenchRow row;
  row.n = n;
  row.gamma = gamma;
  row.mode = config.mode;
  row.seed = config.seed;
  try {
    const GnSpec spec = make_gn_spec(n, gamma, config.mode);
    const GnInstance inst = build_gn(spec);
    const Lcp lcp = reduce(inst.game, inst.partition);

    ConditioningOptions opts;
    opts.sampling.samples = config.samples;
    opts.sampling.hill_climb_rounds = config.hill_climb_rounds;
    opts.kappa_witnesses.push_back(closed_forms(make_gn_spec(n, gamma, AMode::kKappa)).c_tau);
    opts.theta_witnesses.push_back(closed_forms(make_gn_spec(n, gamma, AMode::kTheta)).c_tau);
    opts.kappa_witnesses.push_back(closed_forms(spec).c_tau);
    opts.theta_witnesses.push_back(closed_forms(spec).c_tau);

    const std::size_t reps = std::max<std::size_t>(1, config.repetitions);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      opts.sampling.seed = config.seed + rep;
      const Estimate k = estimate_kappa(lcp.M, opts.sampling, opts.kappa_witnesses);
      const Estimate t = estimate_theta(lcp.M, opts.sampling, opts.theta_witnesses);
      row.kappa_est = rep == 0 ? k.value : std::max(row.kappa_est, k.value);
      row.theta_est = rep == 0 ? t.value : std::min(row.theta_est, t.value);
    }
    row.delta = smallest_eigenvalue_sym(lcp.M).value;

    row.kappa_ub = kappa_global_upper(n, gamma);
    row.kappa_lb_pred = predicted_kappa_lb(n, gamma);
    row.delta_lb = delta_global_lower(n, gamma);
    row.delta_ub_pred = predicted_eig_ub(n, gamma);
    row.theta_lb = theta_global_lower(n, gamma);
    row.theta_ub_pred = predicted_theta_ub(n, gamma);
    row.cond = -row.delta / row.theta_est;

    if (config.run_solver) {
      const IpmSolution sol = solve_potential_reduction(lcp);
      row.solver_iters = sol.iterations();
    }
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
    std::replace(row.status.begin(), row.status.end(), ',', ';');
    std::replace(row.status.begin(), row.status.end(), '\n', ' ');
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<BenchRow> run_bench(const BenchConfig& config, const std::function<void(const BenchRow&)>& on_row) {
  if (config.ns.empty() || config.gammas.empty()) throw std::invalid_argument("bench: empty n or gamma range");
  std::vector<std::pair<std::size_t, double>> cells;
  for (std::size_t n : config.ns)
    for (double g : config.gammas) cells.emplace_back(n, g);

  std::vector<BenchRow> rows(cells.size());
  std::vector<bool> done(cells.size(), false);
  std::size_t emitted = 0;
  std::mutex mu;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      BenchRow row = bench_cell(cells[i].first, cells[i].second, config);
      std::lock_guard<std::mutex> lock(mu);
      rows[i] = std::move(row);
      done[i] = true;
      while (emitted < cells.size() && done[emitted]) {
        if (on_row) on_row(rows[emitted]);
        ++emitted;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(cells.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::string bench_csv_header() {
  return "n,gamma,a_mode,kappa_est,kappa_ub,kappa_lb_pred,delta,delta_lb,delta_ub_pred,"
         "theta_est,theta_lb,theta_ub_pred,cond,solver_iters,wall_ms,seed,status";
}

std::string bench_csv_row(const BenchRow& r, bool with_timing) {
  std::ostringstream os;
  os << r.n << ',' << format_double(r.gamma) << ',' << a_mode_name(r.mode) << ','
     << format_double(r.kappa_est) << ',' << format_double(r.kappa_ub) << ','
     << format_double(r.kappa_lb_pred) << ',' << format_double(r.delta) << ','
     << format_double(r.delta_lb) << ',' << format_double(r.delta_ub_pred) << ','
     << format_double(r.theta_est) << ',' << format_double(r.theta_lb) << ','
     << format_double(r.theta_ub_pred) << ',' << format_double(r.cond) << ',' << r.solver_iters << ','
     << (with_timing ? format_double(std::round(r.wall_ms * 1000.0) / 1000.0) : "0") << ',' << r.seed << ','
     << r.status;
  return os.str();
}

std::vector<BenchRow> read_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != bench_csv_header()) {
    throw FormatError("bench CSV: missing or unexpected header");
  }
  std::vector<BenchRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 17) throw FormatError("bench CSV line " + std::to_string(lineno) + ": expected 17 fields");
    try {
      BenchRow r;
      r.n = std::stoul(f[0]);
      r.gamma = std::stod(f[1]);
      r.mode = parse_a_mode(f[2]);
      r.kappa_est = std::stod(f[3]);
      r.kappa_ub = std::stod(f[4]);
      r.kappa_lb_pred = std::stod(f[5]);
      r.delta = std::stod(f[6]);
      r.delta_lb = std::stod(f[7]);
      r.delta_ub_pred = std::stod(f[8]);
      r.theta_est = std::stod(f[9]);
      r.theta_lb = std::stod(f[10]);
      r.theta_ub_pred = std::stod(f[11]);
      r.cond = std::stod(f[12]);
      r.solver_iters = std::stoul(f[13]);
      r.wall_ms = std::stod(f[14]);
      r.seed = std::stoull(f[15]);
      r.status = f[16];
      rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw FormatError("bench CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 paired points");
  double mx = 0, my = 0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0 && ys[i] > 0.0)) throw std::invalid_argument("loglog_slope: data must be positive");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
    mx += lx.back();
    my += ly.back();
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("loglog_slope: x values are all equal");
  return sxy / sxx;
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string loglog_svg(const std::vector<PlotSeries>& series, const std::string& title, const std::string& x_label,
                       const std::string& y_label) {
  constexpr double kW = 640, kH = 440, kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const PlotSeries& s : series) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!(s.xs[i] > 0 && s.ys[i] > 0)) continue;
      x0 = std::min(x0, std::log10(s.xs[i]));
      x1 = std::max(x1, std::log10(s.xs[i]));
      y0 = std::min(y0, std::log10(s.ys[i]));
      y1 = std::max(y1, std::log10(s.ys[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-9) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return kLeft + (std::log10(x) - x0) / (x1 - x0) * (kW - kLeft - kRight); };
  auto py = [&](double y) { return kH - kBottom - (std::log10(y) - y0) / (y1 - y0) * (kH - kTop - kBottom); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
     << "</text>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight << "\" y2=\""
     << kH - kBottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kH - kBottom
     << "\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(std::ceil(x0)); d <= static_cast<int>(std::floor(x1)); ++d) {
    const double x = px(std::pow(10.0, d));
    os << "<line x1=\"" << x << "\" y1=\"" << kH - kBottom << "\" x2=\"" << x << "\" y2=\"" << kH - kBottom + 5
       << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << kH - kBottom + 18
       << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); ++d) {
    const double y = py(std::pow(10.0, d));
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
       << "\" stroke=\"black\"/><text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << d
       << "</text>\n";
  }
  os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\">" << escape_xml(x_label)
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << kH / 2
     << ")\">" << escape_xml(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const PlotSeries& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!(s.xs[i] > 0 && s.ys[i] > 0)) continue;
      pts << px(s.xs[i]) << ',' << py(s.ys[i]) << ' ';
      os << "<circle cx=\"" << px(s.xs[i]) << "\" cy=\"" << py(s.ys[i]) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str()
       << "\"/>\n";
    std::string legend = s.label;
    try {
      std::ostringstream sl;
      sl.precision(3);
      sl << std::fixed << loglog_slope(s.xs, s.ys);
      legend += " (slope " + sl.str() + ")";
    } catch (const std::invalid_argument&) {
    }
    os << "<text x=\"" << kLeft + 12 << "\" y=\"" << kTop + 16 * (k + 1) << "\" fill=\"" << color << "\">"
       << escape_xml(legend) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

PlotQuantity parse_plot_quantity(const std::string& name) {
  if (name == "kappa") return PlotQuantity::kKappa;
  if (name == "delta") return PlotQuantity::kNegDelta;
  if (name == "theta") return PlotQuantity::kInvTheta;
  throw std::invalid_argument("unknown plot quantity '" + name + "' (kappa | delta | theta)");
}

double plot_value(const BenchRow& row, PlotQuantity q) {
  switch (q) {
    case PlotQuantity::kKappa: return row.kappa_est;
    case PlotQuantity::kNegDelta: return -row.delta;
    case PlotQuantity::kInvTheta: return 1.0 / row.theta_est;
  }
  return 0.0;
}

std::vector<PlotSeries> series_by_gamma(const std::vector<BenchRow>& rows, PlotQuantity q) {
  std::map<double, PlotSeries> by_gamma;
  for (const BenchRow& r : rows) {
    if (r.status != "ok") continue;
    PlotSeries& s = by_gamma[r.gamma];
    s.label = "gamma = " + format_double(r.gamma);
    s.xs.push_back(static_cast<double>(r.n));
    s.ys.push_back(plot_value(r, q));
  }
  std::vector<PlotSeries> out;
  for (auto& [g, s] : by_gamma) out.push_back(std::move(s));
  return out;
}

}  // namespace tbsg
