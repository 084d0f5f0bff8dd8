// tbsg: generate, solve, reduce and certify discounted turn-based stochastic
// games, and sweep the conditioning of the hard family G_n.
//
// Exit status: 0 ok, 1 solver or verification failure, 2 usage or I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tbsg/bench.h"
#include "tbsg/classic_solvers.h"
#include "tbsg/conditioning.h"
#include "tbsg/game_io.h"
#include "tbsg/hard_instances.h"
#include "tbsg/lcp_solvers.h"
#include "tbsg/random_games.h"

namespace {

using namespace tbsg;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct Globals {
  std::uint64_t seed = 0;
  double tol = 1e-6;
  unsigned threads = 1;
  std::string output;
};

void emit(const Globals& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
  } else {
    write_text_file(g.output, text);
  }
}

Partition load_partition(const Game& game, const std::string& game_path, const std::string& explicit_path,
                         std::optional<GnSpec>* gn = nullptr) {
  std::string path = explicit_path;
  if (path.empty() && std::filesystem::exists(partition_sidecar_path(game_path))) {
    path = partition_sidecar_path(game_path);
  }
  if (path.empty()) return default_partition(game);
  PartitionFile file = read_partition_file(path);
  check_partition(game, file.partition);
  if (gn) *gn = file.gn;
  return file.partition;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string family = "gn";
  std::size_t n = 0;
  double gamma = 0.5;
  std::string a_mode = "kappa";
  std::optional<double> a;
  bool dense = false;
};

int run_gen(const Globals& g, const GenArgs& args) {
  if (args.family == "gn") {
    AMode mode = parse_a_mode(args.a_mode);
    if (args.a && mode != AMode::kCustom) {
      throw std::invalid_argument("--a is only accepted with --a-mode custom");
    }
    if (mode == AMode::kCustom && !args.a) throw std::invalid_argument("--a-mode custom needs --a");
    const GnSpec spec = make_gn_spec(args.n, args.gamma, mode, args.a.value_or(0.0));
    const GnInstance inst = build_gn(spec);
    emit(g, game_to_json(inst.game));
    if (!g.output.empty()) {
      write_partition_file(partition_sidecar_path(g.output), {inst.partition, spec});
    }
    return kOk;
  }
  if (args.family == "random") {
    emit(g, game_to_json(random_game(args.n, args.gamma, g.seed, args.dense ? Density::kDense : Density::kSparse)));
    return kOk;
  }
  throw std::invalid_argument("unknown family '" + args.family + "' (gn | random)");
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string game;
  std::string method = "si";
  std::string partition;
  double accuracy = 1e-8;
  std::string trace;
};

SolveMethod parse_method(const std::string& name) {
  for (SolveMethod m : {SolveMethod::kValueIteration, SolveMethod::kStrategyIteration, SolveMethod::kBruteForce,
                        SolveMethod::kPotentialReduction, SolveMethod::kPivoting}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + name + "' (vi | si | brute | ipm | pivot)");
}

int run_solve(const Globals& g, const SolveArgs& args) {
  const SolveMethod method = parse_method(args.method);
  const Game game = read_game_file(args.game);
  SolveResult result;
  std::string trace_path = args.trace.empty() ? args.game + ".trace.csv" : args.trace;
  switch (method) {
    case SolveMethod::kValueIteration:
      result = value_iteration(game, args.accuracy);
      break;
    case SolveMethod::kStrategyIteration:
      result = strategy_iteration(game);
      break;
    case SolveMethod::kBruteForce: {
      BruteForceOptions opts;
      opts.threads = g.threads;
      result = brute_force_solve(game, opts);
      break;
    }
    case SolveMethod::kPotentialReduction:
    case SolveMethod::kPivoting: {
      const Partition partition = load_partition(game, args.game, args.partition);
      LcpSolveOptions opts;
      opts.verify_tol = g.tol;
      opts.ipm.seed = g.seed;
      IpmTrace trace;
      try {
        result = solve_via_lcp(game, partition, method, opts, &trace);
      } catch (const IpmFailure& e) {
        std::ofstream out(trace_path);
        write_trace_csv(out, e.trace());
        std::cerr << "tbsg: " << e.what() << " (trace written to " << trace_path << ")\n";
        return kFailure;
      }
      if (method == SolveMethod::kPotentialReduction && !args.trace.empty()) {
        std::ofstream out(trace_path);
        write_trace_csv(out, trace);
      }
      break;
    }
  }

  const OptimalityReport report = is_optimal(game, result.profile, g.tol);
  std::ostringstream os;
  os.precision(17);
  os << "method " << method_name(method) << "\niterations " << result.iterations << "\n";
  os << "state,action,value\n";
  for (std::size_t i = 0; i < game.num_states(); ++i) {
    os << i << ',' << result.profile[i] << ',' << format_double(result.values(static_cast<Eigen::Index>(i)))
       << "\n";
  }
  os << "optimal " << (report.optimal ? "yes" : "no") << " (max violation " << report.max_violation << ")\n";
  emit(g, os.str());
  return report.optimal ? kOk : kFailure;
}

// ---------------------------------------------------------------------------

struct ReduceArgs {
  std::string game;
  std::string partition;
};

int run_reduce(const Globals& g, const ReduceArgs& args) {
  const Game game = read_game_file(args.game);
  emit(g, lcp_to_json(reduce(game, load_partition(game, args.game, args.partition))));
  return kOk;
}

// ---------------------------------------------------------------------------

struct CertifyArgs {
  std::string game;
  std::string partition;
  std::size_t samples = 10'000;
  std::size_t rounds = 100;
  std::string json;
};

int run_certify(const Globals& g, const CertifyArgs& args) {
  const Game game = read_game_file(args.game);
  std::optional<GnSpec> gn;
  const Partition partition = load_partition(game, args.game, args.partition, &gn);
  ConditioningOptions opts;
  opts.sampling.samples = args.samples;
  opts.sampling.seed = g.seed;
  opts.sampling.threads = g.threads;
  opts.sampling.hill_climb_rounds = args.rounds;
  if (gn) {
    opts.kappa_witnesses.push_back(closed_forms(make_gn_spec(gn->n, gn->gamma, AMode::kKappa)).c_tau);
    opts.theta_witnesses.push_back(closed_forms(make_gn_spec(gn->n, gn->gamma, AMode::kTheta)).c_tau);
  }
  const ConditioningReport report = certify(game, partition, opts);
  if (!args.json.empty()) write_text_file(args.json, report_to_json(report));
  emit(g, report_csv_header() + "\n" + report_csv_row(report) + "\n");
  return report.pmatrix == PMatrixVerdict::kFailed ? kFailure : kOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::size_t> ns;
  std::vector<double> gammas;
  std::string a_mode = "kappa";
  std::size_t reps = 1;
  std::size_t samples = 2'000;
  std::size_t rounds = 100;
  bool no_solver = false;
  bool no_timing = false;
  std::string svg;
};

int run_bench_cmd(const Globals& g, const BenchArgs& args) {
  BenchConfig config;
  config.ns = args.ns;
  config.gammas = args.gammas;
  config.mode = parse_a_mode(args.a_mode);
  if (config.mode == AMode::kCustom) throw std::invalid_argument("bench needs a-mode kappa, eigenvalue or theta");
  config.repetitions = args.reps;
  config.seed = g.seed;
  config.samples = args.samples;
  config.hill_climb_rounds = args.rounds;
  config.threads = g.threads;
  config.run_solver = !args.no_solver;

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!g.output.empty()) {
    file.open(g.output, std::ios::trunc);
    if (!file) throw FormatError("cannot open '" + g.output + "' for writing");
    out = &file;
  }
  *out << bench_csv_header() << "\n" << std::flush;
  bool failed = false;
  const auto rows = run_bench(config, [&](const BenchRow& row) {
    *out << bench_csv_row(row, !args.no_timing) << "\n" << std::flush;
    failed = failed || row.status != "ok";
  });
  if (!args.svg.empty()) {
    const PlotQuantity q = config.mode == AMode::kEigenvalue ? PlotQuantity::kNegDelta
                           : config.mode == AMode::kTheta    ? PlotQuantity::kInvTheta
                                                             : PlotQuantity::kKappa;
    const char* label = q == PlotQuantity::kKappa ? "kappa_est" : q == PlotQuantity::kNegDelta ? "-delta" : "1/theta_est";
    write_text_file(args.svg, loglog_svg(series_by_gamma(rows, q), std::string("G_n: ") + label + " vs n", "n", label));
  }
  return failed ? kFailure : kOk;
}

// ---------------------------------------------------------------------------

struct PlotArgs {
  std::string csv;
  std::string quantity = "kappa";
};

int run_plot(const Globals& g, const PlotArgs& args) {
  std::ifstream in(args.csv);
  if (!in) throw FormatError("cannot open '" + args.csv + "' for reading");
  const PlotQuantity q = parse_plot_quantity(args.quantity);
  const auto series = series_by_gamma(read_bench_csv(in), q);
  const std::string label = q == PlotQuantity::kKappa ? "kappa_est" : q == PlotQuantity::kNegDelta ? "-delta" : "1/theta_est";
  emit(g, loglog_svg(series, "G_n: " + label + " vs n", "n", label));
  for (const PlotSeries& s : series) {
    std::cerr << s.label << ": slope " << loglog_slope(s.xs, s.ys) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discounted turn-based stochastic games via P-matrix LCPs"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--tol", g.tol, "Verification tolerance")->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--output,-o", g.output, "Output file (default: standard output)");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a game file");
  gen_cmd->add_option("--family", gen.family, "gn | random");
  gen_cmd->add_option("--n", gen.n, "Number of states")->required();
  gen_cmd->add_option("--gamma", gen.gamma, "Discount factor in (0,1)");
  gen_cmd->add_option("--a-mode", gen.a_mode, "kappa | eigenvalue | theta | custom");
  gen_cmd->add_option("--a", gen.a, "Cost parameter for --a-mode custom");
  gen_cmd->add_flag("--dense", gen.dense, "Random family: full-support distributions");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Compute optimal values and a strategy profile");
  solve_cmd->add_option("game", solve.game, "Game file")->required();
  solve_cmd->add_option("--method", solve.method, "vi | si | brute | ipm | pivot");
  solve_cmd->add_option("--partition", solve.partition, "Partition file for the LCP routes");
  solve_cmd->add_option("--accuracy", solve.accuracy, "Value-iteration accuracy")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--trace", solve.trace, "Write the potential-reduction trace CSV here");

  ReduceArgs red;
  auto* reduce_cmd = app.add_subcommand("reduce", "Write the LCP (M, q) of a game");
  reduce_cmd->add_option("game", red.game, "Game file")->required();
  reduce_cmd->add_option("--partition", red.partition, "Partition file");

  CertifyArgs cert;
  auto* certify_cmd = app.add_subcommand("certify", "Estimate kappa, delta and theta of the game's LCP matrix");
  certify_cmd->add_option("game", cert.game, "Game file")->required();
  certify_cmd->add_option("--partition", cert.partition, "Partition file");
  certify_cmd->add_option("--samples", cert.samples, "Random samples")->check(CLI::PositiveNumber);
  certify_cmd->add_option("--rounds", cert.rounds, "Hill-climbing rounds");
  certify_cmd->add_option("--json", cert.json, "Also write the full report as JSON");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Sweep G_n over n and gamma, one CSV row per cell");
  bench_cmd->add_option("--n", bench.ns, "State counts, e.g. --n 8 16 32")->required()->delimiter(',');
  bench_cmd->add_option("--gamma", bench.gammas, "Discount factors")->required()->delimiter(',');
  bench_cmd->add_option("--a-mode", bench.a_mode, "kappa | eigenvalue | theta");
  bench_cmd->add_option("--reps", bench.reps, "Sampling restarts per cell")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--samples", bench.samples, "Random samples per estimate")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--rounds", bench.rounds, "Hill-climbing rounds");
  bench_cmd->add_flag("--no-solver", bench.no_solver, "Skip the potential-reduction solve");
  bench_cmd->add_flag("--no-timing", bench.no_timing, "Write wall_ms as 0");
  bench_cmd->add_option("--svg", bench.svg, "Also write a log-log plot");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Log-log SVG of a bench CSV");
  plot_cmd->add_option("csv", plot.csv, "Bench CSV")->required();
  plot_cmd->add_option("--quantity", plot.quantity, "kappa | delta | theta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) return run_gen(g, gen);
    if (*solve_cmd) return run_solve(g, solve);
    if (*reduce_cmd) return run_reduce(g, red);
    if (*certify_cmd) return run_certify(g, cert);
    if (*bench_cmd) return run_bench_cmd(g, bench);
    if (*plot_cmd) return run_plot(g, plot);
  } catch (const SolverError& e) {
    std::cerr << "tbsg: solver failure: " << e.what() << "\n";
    return kFailure;
  } catch (const RecoveryError& e) {
    std::cerr << "tbsg: verification failure: " << e.what() << "\n";
    return kFailure;
  } catch (const PivotingError& e) {
    std::cerr << "tbsg: pivoting failure: " << e.what() << "\n";
    return kFailure;
  } catch (const NumericFailure& e) {
    std::cerr << "tbsg: numeric failure: " << e.what() << "\n";
    return kFailure;
  } catch (const NotPStarError& e) {
    std::cerr << "tbsg: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "tbsg: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
