#include "perisem/cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "perisem/csv.hpp"
#include "perisem/errors.hpp"
#include "perisem/estimator.hpp"
#include "perisem/risk.hpp"
#include "perisem/weights.hpp"

namespace perisem::cli {
namespace fs = std::filesystem;

namespace {

template <class Fn>
void write_file(const fs::path& path, Fn&& fill) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  fill(out);
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

void log_line(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n';
}

const SignalSpec& require_signal(const ExperimentConfig& cfg) {
  if (!cfg.signal) throw Error(ErrorKind::kConfig, "config needs a signal");
  return *cfg.signal;
}

WeightGrid make_grid(const RunContext& ctx, std::size_t n) {
  WeightGrid grid = WeightGrid::build(n, ctx.config.k_star, ctx.config.epsilon);
  if (!grid.dropped().empty()) {
    std::string labels;
    for (const auto& a : grid.dropped()) labels += ' ' + to_string(a);
    log_line(ctx.log, "warning: n=" + std::to_string(n) + ": dropped " +
                          std::to_string(grid.dropped().size()) +
                          " grid members with empty support:" + labels);
  }
  return grid;
}

fs::path horizon_dir(const RunContext& ctx, std::size_t n) {
  if (ctx.config.n.size() == 1) return ctx.out;
  return ctx.out / ("n" + std::to_string(n));
}

std::string cell_name(std::size_t n, double rho, SigmaMode mode) {
  return "n" + std::to_string(n) + "_rho" + csv::format_short(rho) + "_" + to_string(mode);
}

std::string zero_pad(std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*zu", width, value);
  return buf;
}

// Quadrature fine enough that phi_j S is not aliased for j <= j_max.
std::size_t quad_points_for(std::size_t j_max) {
  std::size_t q = kDefaultQuadPoints;
  while (q < 2 * j_max) q *= 2;
  return q;
}

}  // namespace

int run_simulate(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const SignalSpec& signal = require_signal(cfg);
  for (std::size_t n : cfg.n) {
    const fs::path dir = horizon_dir(ctx, n);
    std::vector<double> theta;
    if (cfg.path_steps_per_unit == 0) theta = fourier_coefficients(signal, n, quad_points_for(n));
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      ReplicateRng rng = ReplicateRng::make(cfg.seed, r);
      const std::string tag = "r" + std::to_string(r);
      if (cfg.path_steps_per_unit == 0) {
        const CoefficientNoise xi = simulate_coefficient_noise(cfg.noise, n, n, rng);
        const auto est = estimate_coefficients_exact(theta, xi.xi, n);
        write_file(dir / ("estimates_" + tag + ".csv"),
                   [&](std::ostream& o) { write_estimates_csv(o, est); });
        write_file(dir / ("jumps_" + tag + ".csv"),
                   [&](std::ostream& o) { write_jump_csv(o, xi.jumps); });
      } else {
        const SimulatedPath path =
            simulate_observation(signal, cfg.noise, n, cfg.path_steps_per_unit, rng);
        const auto est = estimate_coefficients_from_path(path.observation, n);
        write_file(dir / ("estimates_" + tag + ".csv"),
                   [&](std::ostream& o) { write_estimates_csv(o, est); });
        write_file(dir / ("jumps_" + tag + ".csv"),
                   [&](std::ostream& o) { write_jump_csv(o, path.jumps); });
        const auto segments = split_path(path.observation);
        for (std::size_t k = 0; k < segments.size(); ++k) {
          write_file(dir / ("segments_" + tag) / ("segment_" + zero_pad(k, 5) + ".csv"),
                     [&](std::ostream& o) { write_path_csv(o, segments[k]); });
        }
      }
    }
    log_line(ctx.log, "simulate: n=" + std::to_string(n) + ", " + std::to_string(cfg.replicates) +
                          " replicate(s) -> " + dir.string());
  }
  return kExitOk;
}

int run_select(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const SignalSpec& signal = require_signal(cfg);
  std::ostringstream summary;
  summary << "n,rho,sigma_mode,replicate,beta,t,support,sigma_used,cost\n";
  for (std::size_t n : cfg.n) {
    const WeightGrid grid = make_grid(ctx, n);
    const auto theta = fourier_coefficients(signal, n, quad_points_for(n));
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      ReplicateRng rng = ReplicateRng::make(cfg.seed, r);
      const CoefficientNoise xi = simulate_coefficient_noise(cfg.noise, n, n, rng);
      const auto est = estimate_coefficients_exact(theta, xi.xi, n);
      for (double rho : cfg.rho) {
        for (SigmaMode mode : cfg.sigma_modes) {
          const SelectionConfig sel_cfg = cfg.selection(rho, mode);
          const SelectionResult res = select(est, grid, sel_cfg);
          write_file(ctx.out / "selection" /
                         (cell_name(n, rho, mode) + "_r" + std::to_string(r) + ".json"),
                     [&](std::ostream& o) { write_selection_json(o, res, grid, sel_cfg); });
          const Alpha alpha = res.chosen.label().value_or(Alpha{0, 0, 0.0});
          summary << n << ',' << csv::format_double(rho) << ',' << to_string(mode) << ',' << r
                  << ',' << alpha.beta << ',' << csv::format_double(alpha.t) << ','
                  << res.chosen.summaries().count << ',' << csv::format_double(res.sigma_used)
                  << ',' << csv::format_double(res.cost_table[res.chosen_index]) << '\n';
        }
      }
    }
    log_line(ctx.log, "select: n=" + std::to_string(n) + " done");
  }
  write_file(ctx.out / "selection_summary.csv", [&](std::ostream& o) { o << summary.str(); });
  return kExitOk;
}

int run_verify(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const SignalSpec& signal = require_signal(cfg);
  if (cfg.replicates < 100) {
    throw Error(ErrorKind::kConfig, "verify needs replicates >= 100");
  }
  const bool needs_derivative =
      cfg.plot_data || cfg.bound == BoundKind::kDn ||
      std::find(cfg.sigma_modes.begin(), cfg.sigma_modes.end(), SigmaMode::kEstimated) !=
          cfg.sigma_modes.end();
  if (needs_derivative && !signal.has_derivative() && !signal.supplied_sdot_l1()) {
    throw Error(ErrorKind::kConfig,
                "signal '" + signal.name() + "' has no derivative, which the requested bound needs");
  }
  const bool estimated =
      std::find(cfg.sigma_modes.begin(), cfg.sigma_modes.end(), SigmaMode::kEstimated) !=
      cfg.sigma_modes.end();

  std::ostringstream table;
  table << kReportCsvHeader << '\n';
  std::ostringstream series;
  series << "n,rho,d_n,d_n_over_n_quarter\n";
  std::size_t failed = 0;
  std::size_t rows = 0;
  const MonteCarloOptions opts{cfg.replicates, cfg.seed, ctx.threads};

  for (std::size_t n : cfg.n) {
    const WeightGrid grid = make_grid(ctx, n);
    std::size_t j_tail = std::max(cfg.j_tail, std::size_t{1});
    if (estimated) j_tail = std::max(j_tail, n);
    for (const auto& g : grid.members()) j_tail = std::max(j_tail, g.last_nonzero());
    const SignalTruth truth = make_truth(signal, j_tail, quad_points_for(j_tail));

    for (double rho : cfg.rho) {
      for (SigmaMode mode : cfg.sigma_modes) {
        const OracleReport report =
            verify_oracle(truth, cfg.noise, n, grid, cfg.selection(rho, mode), opts, cfg.bound);
        write_file(ctx.out / "reports" / (cell_name(n, rho, mode) + ".json"),
                   [&](std::ostream& o) { write_report_json(o, report, grid); });
        table << report_csv_row(report) << '\n';
        ++rows;
        if (!report.holds) ++failed;
        log_line(ctx.log, "verify: n=" + std::to_string(n) + " rho=" + csv::format_short(rho) +
                              " " + to_string(mode) + ": selected " +
                              csv::format_short(report.selected_risk_mc) + " rhs " +
                              csv::format_short(report.bound.rhs) +
                              (report.holds ? " holds" : " FAILS"));
      }
      if (cfg.plot_data) {
        const OracleConstants c = oracle_constants(cfg.noise, truth.sdot_l1, rho, n, grid.mu(),
                                                   grid.nu(), SigmaMode::kKnown);
        series << n << ',' << csv::format_double(rho) << ',' << csv::format_double(*c.d_n) << ','
               << csv::format_double(*c.d_n / std::pow(static_cast<double>(n), 0.25)) << '\n';
      }
    }
  }
  write_file(ctx.out / "oracle_report.csv", [&](std::ostream& o) { o << table.str(); });
  if (cfg.plot_data) {
    write_file(ctx.out / "dn_series.csv", [&](std::ostream& o) { o << series.str(); });
  }
  log_line(ctx.log, "verify: " + std::to_string(rows - failed) + "/" + std::to_string(rows) +
                        " rows hold");
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

int run_grid_dump(const RunContext& ctx) {
  for (std::size_t n : ctx.config.n) {
    const WeightGrid grid = make_grid(ctx, n);
    write_file(ctx.out / ("grid_n" + std::to_string(n) + ".csv"),
               [&](std::ostream& o) { write_grid_csv(o, grid); });
  }
  return kExitOk;
}

int run_ingest(const fs::path& segment_dir, const fs::path& out, std::ostream* log) {
  if (!fs::is_directory(segment_dir)) {
    throw Error(ErrorKind::kIo, "not a directory: " + segment_dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(segment_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<PathObservation> segments;
  segments.reserve(files.size());
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw Error(ErrorKind::kIo, "cannot open " + f.string());
    try {
      segments.push_back(read_path_csv(in));
    } catch (const Error& e) {
      throw Error(e.kind(), f.filename().string() + ": " + e.what());
    }
  }
  const PathObservation path = segments_to_path(segments);
  write_file(out / "path.csv", [&](std::ostream& o) { write_path_csv(o, path); });
  log_line(log, "ingest: " + std::to_string(segments.size()) + " segment(s) -> " +
                    (out / "path.csv").string());
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive estimation of periodic signals observed under semimartingale noise"};
  app.name("perisem");
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string segment_dir;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment config file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "Master seed (overrides seed)");
    sub->add_option("--threads", threads, "Worker threads, 0 = auto");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "Write simulated coefficient estimates");
  CLI::App* select_cmd = app.add_subcommand("select", "Run the penalized selection");
  CLI::App* verify = app.add_subcommand("verify", "Monte Carlo check of the oracle inequality");
  CLI::App* grid_dump = app.add_subcommand("grid-dump", "Dump the Pinsker weight grid");
  for (CLI::App* sub : {simulate, select_cmd, verify, grid_dump}) add_common(sub);
  CLI::App* ingest = app.add_subcommand("ingest", "Join per-period path segments");
  ingest->add_option("dir", segment_dir, "Directory of segment CSVs")->required();
  ingest->add_option("--out", out_dir, "Output directory")->required();

  std::vector<const char*> argv;
  argv.push_back("perisem");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (ingest->parsed()) return run_ingest(segment_dir, out_dir, &err);

    CLI::App* sub = app.get_subcommands().front();
    RunContext ctx;
    ctx.config = load_config(config_path);
    ctx.log = &err;
    if (sub->count("--seed") > 0) ctx.config.seed = seed;
    ctx.out = sub->count("--out") > 0 ? fs::path(out_dir) : ctx.config.output_dir;
    if (sub->count("--threads") > 0) {
      ctx.threads = threads;
    } else if (const char* env = std::getenv("PERISEM_THREADS"); env && *env) {
      try {
        const long long t = csv::parse_int(env);
        if (t < 0) throw Error(ErrorKind::kConfig, "negative");
        ctx.threads = static_cast<unsigned>(t);
      } catch (const Error&) {
        throw Error(ErrorKind::kConfig, std::string("PERISEM_THREADS must be a non-negative integer, got '") + env + "'");
      }
    } else {
      ctx.threads = ctx.config.threads.value_or(0);
    }

    if (sub == simulate) return run_simulate(ctx);
    if (sub == select_cmd) return run_select(ctx);
    if (sub == verify) return run_verify(ctx);
    return run_grid_dump(ctx);
  } catch (const Error& e) {
    err << "perisem: " << to_string(e.kind()) << ": " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    err << "perisem: io: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "perisem: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace perisem::cli
