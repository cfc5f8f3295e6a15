#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "perisem/noise.hpp"
#include "perisem/risk.hpp"
#include "perisem/selection.hpp"
#include "perisem/signal.hpp"

namespace perisem::cli {

/// Everything one batch run needs. Parsed from flat `key = value` text where
/// `n`, `rho` and `sigma_mode` may repeat to form lists.
struct ExperimentConfig {
  std::string signal_ref;  ///< catalogue name or coefficient file path
  std::optional<SignalSpec> signal;
  NoiseParams noise{1.0, 1.0, 1.0, JumpLaw::kRademacher};
  std::vector<std::size_t> n;
  std::vector<double> rho{SelectionConfig::kDefaultRho};
  std::vector<SigmaMode> sigma_modes{SigmaMode::kEstimated};
  std::optional<double> sigma;  ///< known sigma; sigma* when absent
  std::optional<int> k_star;
  std::optional<double> epsilon;
  std::size_t replicates = 1000;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "perisem-out";
  std::optional<unsigned> threads;
  BoundKind bound = BoundKind::kBStar;
  std::size_t path_steps_per_unit = 0;  ///< 0: exact coefficient simulation
  bool plot_data = false;
  std::size_t j_tail = kDefaultTail;

  SelectionConfig selection(double rho, SigmaMode mode) const;
};

/// Throws Error(kConfig) on unknown keys, repeated scalar keys, malformed
/// values or values that violate a module invariant. Relative coefficient
/// file paths resolve against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace perisem::cli
