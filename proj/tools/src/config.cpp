#include "perisem/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <string_view>

#include "perisem/csv.hpp"
#include "perisem/errors.hpp"
#include "perisem/weights.hpp"

namespace perisem::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::kConfig, "config line " + std::to_string(line) + ": " + msg);
}

std::uint64_t parse_u64(std::string_view v, std::size_t line, const char* key) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    fail(line, std::string(key) + " must be a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_real(std::string_view v, std::size_t line, const char* key) {
  try {
    const double d = csv::parse_double(v);
    if (!std::isfinite(d)) fail(line, std::string(key) + " must be finite");
    return d;
  } catch (const Error&) {
    fail(line, std::string(key) + " must be a number, got '" + std::string(v) + "'");
  }
}

bool parse_bool(std::string_view v, std::size_t line, const char* key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(line, std::string(key) + " must be true or false");
}

const std::set<std::string_view> kListKeys{"n", "rho", "sigma_mode"};
const std::set<std::string_view> kScalarKeys{
    "signal", "rho1",     "rho2",        "lambda",  "jump_law",            "sigma",
    "k_star", "epsilon",  "replicates",  "seed",    "output_dir",          "threads",
    "bound",  "j_tail",   "plot_data",   "path_steps_per_unit"};

constexpr double kMaxGridMembers = 1e6;

}  // namespace

SelectionConfig ExperimentConfig::selection(double rho_value, SigmaMode mode) const {
  if (mode == SigmaMode::kEstimated) return SelectionConfig::estimated(rho_value);
  return SelectionConfig::known(sigma.value_or(sigma_star(noise)), rho_value);
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  bool rho_given = false;
  bool mode_given = false;
  double rho1 = 1.0;
  double rho2 = 1.0;
  double lambda = 1.0;
  JumpLaw law = JumpLaw::kRademacher;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) fail(line_no, "empty value for " + key);

    if (kListKeys.count(key) == 0 && kScalarKeys.count(key) == 0) {
      fail(line_no, "unknown key '" + key + "'");
    }
    if (kScalarKeys.count(key) != 0 && !seen.insert(key).second) {
      fail(line_no, "key '" + key + "' given twice");
    }

    if (key == "n") {
      const auto n = parse_u64(value, line_no, "n");
      if (n < 2) fail(line_no, "n must be >= 2");
      cfg.n.push_back(static_cast<std::size_t>(n));
    } else if (key == "rho") {
      if (!rho_given) cfg.rho.clear();
      rho_given = true;
      const double r = parse_real(value, line_no, "rho");
      try {
        validate_rho(r);
      } catch (const Error& e) {
        fail(line_no, e.what());
      }
      cfg.rho.push_back(r);
    } else if (key == "sigma_mode") {
      if (!mode_given) cfg.sigma_modes.clear();
      mode_given = true;
      if (value == "known") {
        cfg.sigma_modes.push_back(SigmaMode::kKnown);
      } else if (value == "estimated") {
        cfg.sigma_modes.push_back(SigmaMode::kEstimated);
      } else {
        fail(line_no, "sigma_mode must be known or estimated");
      }
    } else if (key == "signal") {
      cfg.signal_ref = std::string(value);
    } else if (key == "rho1") {
      rho1 = parse_real(value, line_no, "rho1");
    } else if (key == "rho2") {
      rho2 = parse_real(value, line_no, "rho2");
    } else if (key == "lambda") {
      lambda = parse_real(value, line_no, "lambda");
    } else if (key == "jump_law") {
      if (value == "rademacher") {
        law = JumpLaw::kRademacher;
      } else if (value == "gaussian") {
        law = JumpLaw::kStandardGaussian;
      } else {
        fail(line_no, "jump_law must be rademacher or gaussian");
      }
    } else if (key == "sigma") {
      cfg.sigma = parse_real(value, line_no, "sigma");
      if (!(*cfg.sigma > 0.0)) fail(line_no, "sigma must be positive");
    } else if (key == "k_star") {
      const auto k = parse_u64(value, line_no, "k_star");
      if (k < 1 || k > 64) fail(line_no, "k_star must lie in [1, 64]");
      cfg.k_star = static_cast<int>(k);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_real(value, line_no, "epsilon");
      if (!(*cfg.epsilon > 0.0 && *cfg.epsilon <= 1.0)) fail(line_no, "epsilon must lie in (0, 1]");
    } else if (key == "replicates") {
      cfg.replicates = parse_u64(value, line_no, "replicates");
      if (cfg.replicates < 1) fail(line_no, "replicates must be >= 1");
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, line_no, "seed");
    } else if (key == "output_dir") {
      cfg.output_dir = std::string(value);
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(parse_u64(value, line_no, "threads"));
    } else if (key == "bound") {
      if (value == "b_star") {
        cfg.bound = BoundKind::kBStar;
      } else if (value == "d_n") {
        cfg.bound = BoundKind::kDn;
      } else {
        fail(line_no, "bound must be b_star or d_n");
      }
    } else if (key == "j_tail") {
      cfg.j_tail = parse_u64(value, line_no, "j_tail");
      if (cfg.j_tail < 1) fail(line_no, "j_tail must be >= 1");
    } else if (key == "plot_data") {
      cfg.plot_data = parse_bool(value, line_no, "plot_data");
    } else if (key == "path_steps_per_unit") {
      cfg.path_steps_per_unit = parse_u64(value, line_no, "path_steps_per_unit");
      if (cfg.path_steps_per_unit != 0 && cfg.path_steps_per_unit < 8) {
        fail(line_no, "path_steps_per_unit must be 0 or >= 8");
      }
    }
  }

  try {
    cfg.noise = NoiseParams(rho1, rho2, lambda, law);
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, std::string("noise parameters: ") + e.what());
  }
  if (cfg.n.empty()) throw Error(ErrorKind::kConfig, "config needs at least one n");
  for (SigmaMode mode : cfg.sigma_modes) {
    if (mode != SigmaMode::kEstimated) continue;
    for (std::size_t n : cfg.n) {
      if (n < 4) throw Error(ErrorKind::kConfig, "estimated sigma needs every n >= 4");
    }
  }
  for (std::size_t n : cfg.n) {
    const double eps = cfg.epsilon.value_or(default_epsilon(n));
    const double members = cfg.k_star.value_or(default_k_star(n)) * std::floor(1.0 / (eps * eps));
    if (members > kMaxGridMembers) {
      throw Error(ErrorKind::kConfig, "weight grid for n = " + std::to_string(n) + " would have " +
                                          csv::format_short(members) + " members");
    }
    try {
      WeightGrid::build(n, cfg.k_star, cfg.epsilon);
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, "weight grid for n = " + std::to_string(n) + ": " + e.what());
    }
  }

  if (!cfg.signal_ref.empty()) {
    if (auto s = catalogue(cfg.signal_ref)) {
      cfg.signal = std::move(*s);
    } else {
      std::filesystem::path p = cfg.signal_ref;
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      try {
        cfg.signal = load_coefficient_file(p.string());
      } catch (const Error& e) {
        throw Error(ErrorKind::kConfig, "signal '" + cfg.signal_ref +
                                            "' is neither a catalogue name nor a readable "
                                            "coefficient file: " + e.what());
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

}  // namespace perisem::cli
