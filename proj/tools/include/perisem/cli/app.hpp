#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "perisem/cli/config.hpp"

namespace perisem::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitError = 2;

/// Resolved run settings: config plus command-line overrides.
struct RunContext {
  ExperimentConfig config;
  std::filesystem::path out;
  unsigned threads = 0;
  std::ostream* log = nullptr;  ///< progress and warnings; may be null
};

/// estimates_r{r}.csv and jumps_r{r}.csv per replicate (under n{N}/ when the
/// config lists several horizons). With path_steps_per_unit set, estimates
/// come from a simulated path whose per-period segments are written to
/// segments_r{r}/.
int run_simulate(const RunContext& ctx);

/// One selection per (n, rho, sigma mode, replicate): selection/*.json plus
/// selection_summary.csv.
int run_select(const RunContext& ctx);

/// Oracle-inequality check over the (n, rho, sigma mode) matrix:
/// oracle_report.csv and reports/*.json, plus dn_series.csv with plot_data.
/// Returns kExitCheckFailed when any row does not hold.
int run_verify(const RunContext& ctx);

/// grid_n{N}.csv per horizon.
int run_grid_dump(const RunContext& ctx);

/// Concatenates the per-period path CSVs in `segment_dir` (sorted by file
/// name) into out/path.csv.
int run_ingest(const std::filesystem::path& segment_dir, const std::filesystem::path& out,
               std::ostream* log);

/// Full command line entry point; never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace perisem::cli
