#include "perisem/selection.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "json.hpp"
#include "perisem/errors.hpp"

namespace perisem {

const char* to_string(SigmaMode mode) noexcept {
  return mode == SigmaMode::kKnown ? "known" : "estimated";
}

void validate_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0 / 3.0)) {
    throw Error(ErrorKind::kConfig,
                "rho must satisfy 0 < rho < 1/3 (oracle inequality hypothesis), got " +
                    std::to_string(rho));
  }
}

SelectionConfig::SelectionConfig(double rho, SigmaMode mode, double sigma)
    : rho_(rho), mode_(mode), sigma_(sigma) {
  validate_rho(rho);
}

SelectionConfig SelectionConfig::known(double sigma, double rho) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::kConfig, "known sigma must be positive");
  }
  return SelectionConfig(rho, SigmaMode::kKnown, sigma);
}

SelectionConfig SelectionConfig::estimated(double rho) {
  return SelectionConfig(rho, SigmaMode::kEstimated, 0.0);
}

std::size_t sigma_hat_start(std::size_t n) {
  std::size_t r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r + 1;
}

double sigma_hat(const CoefficientEstimates& est) {
  const std::size_t n = est.n();
  if (n < 4) throw Error(ErrorKind::kHorizonTooSmall, "sigma_hat needs n >= 4");
  if (est.j_max() < n) {
    throw Error(ErrorKind::kInsufficientCoefficients,
                "sigma_hat needs all n coefficient estimates");
  }
  double sum = 0.0;
  for (std::size_t j = sigma_hat_start(n); j <= n; ++j) sum += est(j) * est(j);
  return sum;
}

std::vector<double> theta_tilde(const CoefficientEstimates& est, double sigma_used) {
  const double shift = sigma_used / static_cast<double>(est.n());
  std::vector<double> out(est.j_max());
  for (std::size_t j = 1; j <= est.j_max(); ++j) out[j - 1] = est(j) * est(j) - shift;
  return out;
}

double penalty(const WeightSequence& gamma, std::size_t n, double sigma_used) {
  return sigma_used * gamma.summaries().sq_norm / static_cast<double>(n);
}

double cost(const WeightSequence& gamma, const CoefficientEstimates& est, double rho,
            double sigma_used) {
  validate_rho(rho);
  if (gamma.last_nonzero() > est.j_max()) {
    throw Error(ErrorKind::kBudget, "weight support exceeds available estimates");
  }
  const double shift = sigma_used / static_cast<double>(est.n());
  double fit = 0.0;
  double cross = 0.0;
  for (std::size_t j = 1; j <= gamma.last_nonzero(); ++j) {
    const double g = gamma(j);
    const double sq = est(j) * est(j);
    fit += g * g * sq;
    cross += g * (sq - shift);
  }
  return fit - 2.0 * cross + rho * penalty(gamma, est.n(), sigma_used);
}

std::size_t argmin_with_tiebreak(std::span<const double> costs, const WeightGrid& grid) {
  const auto& members = grid.members();
  std::size_t best = 0;
  for (std::size_t i = 1; i < costs.size(); ++i) {
    if (costs[i] < costs[best]) {
      best = i;
    } else if (costs[i] == costs[best]) {
      const auto& a = members[i].label();
      const auto& b = members[best].label();
      if (a && b && *a < *b) best = i;
    }
  }
  return best;
}

SelectionResult select(const CoefficientEstimates& est, const WeightGrid& grid,
                       const SelectionConfig& cfg) {
  if (grid.members().empty()) throw Error(ErrorKind::kConfig, "weight grid is empty");
  const double sigma_used =
      cfg.mode() == SigmaMode::kKnown ? cfg.known_sigma() : sigma_hat(est);
  std::vector<double> table;
  table.reserve(grid.nu());
  for (const auto& g : grid.members()) table.push_back(cost(g, est, cfg.rho(), sigma_used));
  const std::size_t best = argmin_with_tiebreak(table, grid);
  const WeightSequence& chosen = grid.members()[best];
  return SelectionResult{best, chosen, std::move(table), sigma_used,
                         weighted_estimate(chosen, est)};
}

void write_selection_json(std::ostream& out, const SelectionResult& result,
                          const WeightGrid& grid, const SelectionConfig& cfg) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["n"] = grid.n();
  doc["rho"] = cfg.rho();
  doc["sigma_mode"] = to_string(cfg.mode());
  doc["sigma_used"] = result.sigma_used;
  ordered_json chosen;
  chosen["index"] = result.chosen_index;
  if (const auto& a = result.chosen.label()) {
    chosen["beta"] = a->beta;
    chosen["t"] = a->t;
  }
  chosen["support"] = result.chosen.summaries().count;
  chosen["sq_norm"] = result.chosen.summaries().sq_norm;
  doc["chosen"] = chosen;
  ordered_json table = ordered_json::array();
  for (std::size_t i = 0; i < grid.members().size(); ++i) {
    ordered_json row;
    if (const auto& a = grid.members()[i].label()) {
      row["beta"] = a->beta;
      row["t"] = a->t;
    } else {
      row["index"] = i;
    }
    row["cost"] = result.cost_table[i];
    table.push_back(row);
  }
  doc["cost_table"] = table;
  doc["estimate_coefficients"] = result.estimate.as_coefficients()->theta;
  out << doc.dump(2) << '\n';
}

}  // namespace perisem
