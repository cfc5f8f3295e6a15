#include "perisem/risk.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "json.hpp"
#include "perisem/csv.hpp"
#include "perisem/errors.hpp"
#include "perisem/estimator.hpp"
#include "perisem/parallel.hpp"

namespace perisem {

SignalTruth make_truth(const SignalSpec& s, std::size_t j_tail, std::size_t quad_points) {
  SignalTruth truth;
  truth.name = s.name();
  truth.theta = fourier_coefficients(s, j_tail, quad_points);
  if (s.has_derivative() || s.supplied_sdot_l1()) truth.sdot_l1 = sdot_l1(s, quad_points);
  if (const auto* c = s.as_coefficients(); c && c->theta.size() <= j_tail) {
    truth.tail_bound = 0.0;
  } else if (truth.sdot_l1) {
    truth.tail_bound = 4.0 * *truth.sdot_l1 * *truth.sdot_l1 / static_cast<double>(j_tail + 1);
  }
  return truth;
}

double analytic_risk(const WeightSequence& gamma, std::span<const double> theta,
                     double sigma_star, std::size_t n) {
  if (gamma.last_nonzero() > theta.size()) {
    throw Error(ErrorKind::kInsufficientCoefficients, "j_tail must cover the weight support");
  }
  double bias = 0.0;
  for (std::size_t j = 1; j <= theta.size(); ++j) {
    const double shrink = 1.0 - gamma(j);
    bias += shrink * shrink * theta[j - 1] * theta[j - 1];
  }
  // Same expression as penalty(gamma, n, sigma*), so P_n(gamma) <= R holds
  // exactly in floating point.
  return bias + penalty(gamma, n, sigma_star);
}

double analytic_risk(const WeightSequence& gamma, const SignalSpec& s, double sigma_star,
                     std::size_t n, std::size_t j_tail) {
  const auto theta = fourier_coefficients(s, j_tail);
  return analytic_risk(gamma, theta, sigma_star, n);
}

std::size_t required_estimates(const WeightGrid& grid, const SelectionConfig& cfg) {
  if (cfg.mode() == SigmaMode::kEstimated) return grid.n();
  std::size_t reach = 1;
  for (const auto& g : grid.members()) reach = std::max(reach, g.last_nonzero());
  return std::min(reach, grid.n());
}

namespace {

ReplicateOutcome score(const SignalTruth& truth, const CoefficientEstimates& est,
                       const WeightGrid& grid, const SelectionConfig& cfg) {
  const SelectionResult sel = select(est, grid, cfg);
  return ReplicateOutcome{empirical_error(sel.chosen, est, truth.theta), sel.chosen_index,
                          sel.sigma_used};
}

void require_truth(const SignalTruth& truth, std::size_t j_max) {
  if (truth.theta.size() < j_max) {
    throw Error(ErrorKind::kInsufficientCoefficients,
                "true coefficients must extend to j = " + std::to_string(j_max));
  }
}

}  // namespace

ReplicateOutcome run_replicate(const SignalTruth& truth, const NoiseParams& noise,
                               std::size_t n, const WeightGrid& grid,
                               const SelectionConfig& cfg, ReplicateRng& rng) {
  const std::size_t j_max = required_estimates(grid, cfg);
  require_truth(truth, j_max);
  const CoefficientNoise xi = simulate_coefficient_noise(noise, n, j_max, rng);
  return score(truth, estimate_coefficients_exact(truth.theta, xi.xi, n), grid, cfg);
}

ReplicateOutcome run_noiseless(const SignalTruth& truth, std::size_t n, const WeightGrid& grid,
                               const SelectionConfig& cfg) {
  const std::size_t j_max = required_estimates(grid, cfg);
  require_truth(truth, j_max);
  CoefficientEstimates est(std::vector<double>(truth.theta.begin(),
                                               truth.theta.begin() + static_cast<std::ptrdiff_t>(j_max)),
                           n);
  return score(truth, est, grid, cfg);
}

MeanSe mean_and_se(std::span<const double> values) {
  MeanSe out;
  if (values.empty()) return out;
  const double count = static_cast<double>(values.size());
  out.mean = pairwise_sum(values) / count;
  if (values.size() < 2) return out;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - out.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / (count - 1.0);
  out.se = std::sqrt(var / count);
  return out;
}

MiseResult mise_monte_carlo(const SignalTruth& truth, const NoiseParams& noise, std::size_t n,
                            const WeightGrid& grid, const SelectionConfig& cfg,
                            const MonteCarloOptions& opts) {
  if (opts.replicates < 100) {
    throw Error(ErrorKind::kConfig, "Monte Carlo MISE needs at least 100 replicates");
  }
  require_truth(truth, required_estimates(grid, cfg));
  std::vector<ReplicateOutcome> outcomes(opts.replicates);
  parallel_for(opts.replicates, opts.threads, [&](std::size_t r) {
    ReplicateRng rng = ReplicateRng::make(opts.seed, r);
    outcomes[r] = run_replicate(truth, noise, n, grid, cfg, rng);
  });
  MiseResult result;
  result.chosen_histogram.assign(grid.nu(), 0);
  result.per_replicate.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    result.per_replicate.push_back(o.risk);
    ++result.chosen_histogram[o.chosen_index];
  }
  const MeanSe stats = mean_and_se(result.per_replicate);
  result.mean = stats.mean;
  result.se = stats.se;
  return result;
}

double c2_star_bound(const NoiseParams& noise) {
  const double s = sigma_star(noise);
  return 4.0 * s * (s + noise.rho2() * noise.rho2() * noise.m4());
}

double psi_n(double rho, double sigma, double sigma_star, double c1, double c2, std::size_t nu) {
  validate_rho(rho);
  if (!(sigma > 0.0)) throw Error(ErrorKind::kConfig, "sigma must be positive");
  const double v = static_cast<double>(nu);
  return (2.0 * sigma * sigma_star * v + 4.0 * sigma * c1 + 2.0 * v * c2) /
         (sigma * rho * (1.0 - 3.0 * rho));
}

double kappa_n(double sdot_l1, double sigma, double sigma_star, double c1, double c2,
               std::size_t n) {
  const double nn = static_cast<double>(n);
  return 4.0 * sdot_l1 * sdot_l1 + sigma + std::sqrt(c2) +
         4.0 * sdot_l1 * std::sqrt(sigma_star) / std::pow(nn, 0.25) + c1 / std::sqrt(nn);
}

double kappa_n(const SignalSpec& s, double sigma, double sigma_star, double c1, double c2,
               std::size_t n) {
  return kappa_n(sdot_l1(s), sigma, sigma_star, c1, c2, n);
}

double oracle_factor(double rho) {
  validate_rho(rho);
  return (1.0 + 3.0 * rho - 2.0 * rho * rho) / (1.0 - 3.0 * rho);
}

const char* to_string(BoundKind kind) noexcept {
  return kind == BoundKind::kBStar ? "b_star" : "d_n";
}

OracleConstants oracle_constants(const NoiseParams& noise, std::optional<double> sdot_l1,
                                 double rho, std::size_t n, std::size_t mu, std::size_t nu,
                                 SigmaMode mode) {
  validate_rho(rho);
  OracleConstants c;
  c.sigma_star = sigma_star(noise);
  c.sigma = c.sigma_star;
  c.c1_star = 0.0;
  c.c2_star_bound = c2_star_bound(noise);
  c.mu = mu;
  c.nu = nu;
  c.psi = psi_n(rho, c.sigma, c.sigma_star, c.c1_star, c.c2_star_bound, nu);
  const double root_n = std::sqrt(static_cast<double>(n));
  if (sdot_l1) {
    c.kappa = kappa_n(*sdot_l1, c.sigma, c.sigma_star, c.c1_star, c.c2_star_bound, n);
    c.d_n = 2.0 * c.psi + 2.0 * rho * (1.0 - rho) * static_cast<double>(mu) * *c.kappa /
                              ((1.0 - 3.0 * rho) * root_n);
  }
  if (mode == SigmaMode::kEstimated) {
    if (!c.kappa) {
      throw Error(ErrorKind::kCapability,
                  "estimated-sigma bound needs |S'|_1; signal has no derivative");
    }
    c.sigma_error_bound = *c.kappa / root_n;
  }
  c.b_star = c.psi + 6.0 * static_cast<double>(mu) * c.sigma_error_bound / (1.0 - 3.0 * rho);
  return c;
}

OracleBound oracle_bound(const OracleConstants& constants, double rho, std::size_t n,
                         double oracle_risk, BoundKind kind) {
  OracleBound b;
  b.factor = oracle_factor(rho);
  if (kind == BoundKind::kBStar) {
    b.additive = constants.b_star;
  } else {
    if (!constants.d_n) {
      throw Error(ErrorKind::kCapability, "D_n needs |S'|_1; signal has no derivative");
    }
    b.additive = *constants.d_n;
  }
  b.rhs = b.factor * oracle_risk + b.additive / static_cast<double>(n);
  return b;
}

double d_n_default_grid(const NoiseParams& noise, double sdot_l1, double rho, std::size_t n) {
  const WeightGrid grid = WeightGrid::build(n);
  const OracleConstants c =
      oracle_constants(noise, sdot_l1, rho, n, grid.mu(), grid.nu(), SigmaMode::kEstimated);
  return *c.d_n;
}

OracleReport verify_oracle(const SignalTruth& truth, const NoiseParams& noise, std::size_t n,
                           const WeightGrid& grid, const SelectionConfig& cfg,
                           const MonteCarloOptions& opts, BoundKind kind) {
  OracleReport report;
  report.n = n;
  report.rho = cfg.rho();
  report.sigma_mode = cfg.mode();
  report.bound_kind = kind;
  report.tail_bound = truth.tail_bound;
  report.constants =
      oracle_constants(noise, truth.sdot_l1, cfg.rho(), n, grid.mu(), grid.nu(), cfg.mode());

  const double s_star = report.constants.sigma_star;
  report.per_gamma_risk.reserve(grid.nu());
  for (const auto& g : grid.members()) {
    report.per_gamma_risk.push_back(analytic_risk(g, truth.theta, s_star, n));
  }
  const auto best = std::min_element(report.per_gamma_risk.begin(), report.per_gamma_risk.end());
  report.oracle_index = static_cast<std::size_t>(best - report.per_gamma_risk.begin());
  report.oracle_risk = *best;

  const MiseResult mc = mise_monte_carlo(truth, noise, n, grid, cfg, opts);
  report.selected_risk_mc = mc.mean;
  report.selected_risk_se = mc.se;
  report.chosen_histogram = mc.chosen_histogram;

  report.bound = oracle_bound(report.constants, cfg.rho(), n, report.oracle_risk, kind);
  report.holds = report.selected_risk_mc - 2.0 * report.selected_risk_se <= report.bound.rhs;
  return report;
}

MeanSe sigma_hat_error_mc(const SignalTruth& truth, const NoiseParams& noise, std::size_t n,
                          const MonteCarloOptions& opts) {
  if (n < 4) throw Error(ErrorKind::kHorizonTooSmall, "sigma_hat needs n >= 4");
  require_truth(truth, n);
  const double s_star = sigma_star(noise);
  std::vector<double> errors(opts.replicates);
  parallel_for(opts.replicates, opts.threads, [&](std::size_t r) {
    ReplicateRng rng = ReplicateRng::make(opts.seed, r);
    const CoefficientNoise xi = simulate_coefficient_noise(noise, n, n, rng);
    const CoefficientEstimates est = estimate_coefficients_exact(truth.theta, xi.xi, n);
    errors[r] = std::abs(sigma_hat(est) - s_star);
  });
  return mean_and_se(errors);
}

void write_report_json(std::ostream& out, const OracleReport& report, const WeightGrid& grid) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["n"] = report.n;
  doc["rho"] = report.rho;
  doc["sigma_mode"] = to_string(report.sigma_mode);
  doc["bound"] = to_string(report.bound_kind);
  doc["oracle_risk"] = report.oracle_risk;
  if (const auto& a = grid.members()[report.oracle_index].label()) {
    doc["oracle_alpha"] = {{"beta", a->beta}, {"t", a->t}};
  }
  doc["tail_bound"] = report.tail_bound ? ordered_json(*report.tail_bound) : ordered_json(nullptr);
  doc["selected_risk_mc"] = report.selected_risk_mc;
  doc["selected_risk_se"] = report.selected_risk_se;
  const auto& c = report.constants;
  doc["constants"] = {
      {"sigma", c.sigma},
      {"sigma_star", c.sigma_star},
      {"c1_star", c.c1_star},
      {"c2_star_bound", c.c2_star_bound},
      {"psi_n", c.psi},
      {"b_star_n", c.b_star},
      {"kappa_n", c.kappa ? ordered_json(*c.kappa) : ordered_json(nullptr)},
      {"sigma_error_bound", c.sigma_error_bound},
      {"d_n", c.d_n ? ordered_json(*c.d_n) : ordered_json(nullptr)},
      {"mu", c.mu},
      {"nu", c.nu},
  };
  doc["factor"] = report.bound.factor;
  doc["additive"] = report.bound.additive;
  doc["rhs"] = report.bound.rhs;
  doc["holds"] = report.holds;
  ordered_json members = ordered_json::array();
  for (std::size_t i = 0; i < grid.members().size(); ++i) {
    ordered_json row;
    if (const auto& a = grid.members()[i].label()) {
      row["beta"] = a->beta;
      row["t"] = a->t;
    } else {
      row["index"] = i;
    }
    row["risk"] = report.per_gamma_risk[i];
    row["chosen"] = report.chosen_histogram[i];
    members.push_back(row);
  }
  doc["per_gamma"] = members;
  out << doc.dump(2) << '\n';
}

std::string report_csv_row(const OracleReport& report) {
  std::string row;
  row += std::to_string(report.n) + ',';
  row += csv::format_double(report.rho) + ',';
  row += std::string(to_string(report.sigma_mode)) + ',';
  row += csv::format_double(report.oracle_risk) + ',';
  row += csv::format_double(report.selected_risk_mc) + ',';
  row += csv::format_double(report.selected_risk_se) + ',';
  row += csv::format_double(report.bound.factor) + ',';
  row += csv::format_double(report.bound.additive) + ',';
  row += csv::format_double(report.bound.rhs) + ',';
  row += report.holds ? "true" : "false";
  return row;
}

}  // namespace perisem
