#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perisem/noise.hpp"
#include "perisem/rng.hpp"
#include "perisem/selection.hpp"
#include "perisem/signal.hpp"
#include "perisem/weights.hpp"

namespace perisem {

/// True coefficients of S up to j_tail, plus what the bounds need.
struct SignalTruth {
  std::string name;
  std::vector<double> theta;       ///< theta_1..theta_{j_tail}
  std::optional<double> sdot_l1;   ///< |S'|_1 when S is differentiable
  /// Upper bound on sum_{j > j_tail} theta_j^2 (4 |S'|_1^2 / (j_tail + 1)),
  /// or exactly 0 for coefficient signals that fit inside j_tail.
  std::optional<double> tail_bound;

  std::size_t j_tail() const noexcept { return theta.size(); }
};

SignalTruth make_truth(const SignalSpec& s, std::size_t j_tail,
                       std::size_t quad_points = kDefaultQuadPoints);

/// R(S_gamma, S) = sum_{j <= j_tail} (1 - gamma(j))^2 theta_j^2 + sigma* |gamma|^2 / n.
/// Throws kInsufficientCoefficients when gamma reaches past theta.size().
double analytic_risk(const WeightSequence& gamma, std::span<const double> theta,
                     double sigma_star, std::size_t n);
double analytic_risk(const WeightSequence& gamma, const SignalSpec& s, double sigma_star,
                     std::size_t n, std::size_t j_tail);

struct MonteCarloOptions {
  std::size_t replicates = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

struct ReplicateOutcome {
  double risk = 0.0;  ///< ||S_hat_* - S||^2 in coefficient space incl. tail
  std::size_t chosen_index = 0;
  double sigma_used = 0.0;
};

/// Number of coefficient estimates a replicate needs: n when sigma is
/// estimated (sigma_hat sums up to n), otherwise the largest grid support.
std::size_t required_estimates(const WeightGrid& grid, const SelectionConfig& cfg);

/// One simulate -> estimate -> select -> score pass.
ReplicateOutcome run_replicate(const SignalTruth& truth, const NoiseParams& noise,
                               std::size_t n, const WeightGrid& grid,
                               const SelectionConfig& cfg, ReplicateRng& rng);

/// The same pipeline with theta_hat = theta exactly.
ReplicateOutcome run_noiseless(const SignalTruth& truth, std::size_t n, const WeightGrid& grid,
                               const SelectionConfig& cfg);

struct MiseResult {
  double mean = 0.0;
  double se = 0.0;
  std::vector<std::size_t> chosen_histogram;  ///< counts per grid member
  std::vector<double> per_replicate;
};

/// Monte Carlo MISE of the selected estimator. Replicate r draws from
/// ReplicateRng::make(seed, r); results are identical for any thread count.
/// Throws kConfig when replicates < 100.
MiseResult mise_monte_carlo(const SignalTruth& truth, const NoiseParams& noise, std::size_t n,
                            const WeightGrid& grid, const SelectionConfig& cfg,
                            const MonteCarloOptions& opts);

/// Mean and standard error of a sample, summed pairwise.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_and_se(std::span<const double> values);

/// sup_n c2*(n) <= 4 sigma* (sigma* + rho2^2 E Y^4).
double c2_star_bound(const NoiseParams& noise);

/// Psi_n(rho) = (2 sigma sigma* nu + 4 sigma c1 + 2 nu c2) / (sigma rho (1 - 3 rho)).
double psi_n(double rho, double sigma, double sigma_star, double c1, double c2, std::size_t nu);

/// kappa_n(S) = 4|S'|^2 + sigma + sqrt(c2) + 4|S'| sqrt(sigma*) / n^{1/4} + c1 / n^{1/2}.
double kappa_n(double sdot_l1, double sigma, double sigma_star, double c1, double c2,
               std::size_t n);
double kappa_n(const SignalSpec& s, double sigma, double sigma_star, double c1, double c2,
               std::size_t n);

/// (1 + 3 rho - 2 rho^2) / (1 - 3 rho).
double oracle_factor(double rho);

enum class BoundKind {
  kBStar,  ///< additive term B*_n(rho)
  kDn,     ///< additive term D_n(rho)
};

const char* to_string(BoundKind kind) noexcept;

struct OracleConstants {
  double sigma = 0.0;
  double sigma_star = 0.0;
  double c1_star = 0.0;
  double c2_star_bound = 0.0;
  double psi = 0.0;
  std::optional<double> kappa;
  /// Bound used for E|sigma_hat - sigma|: kappa/sqrt(n) (estimated) or 0 (known).
  double sigma_error_bound = 0.0;
  double b_star = 0.0;
  std::optional<double> d_n;
  std::size_t mu = 0;
  std::size_t nu = 0;
};

/// Constants of the oracle inequality instantiated with sigma = sigma*,
/// c1* = 0 and c2* replaced by its uniform bound. Throws kCapability in
/// estimated mode when |S'|_1 is unavailable.
OracleConstants oracle_constants(const NoiseParams& noise, std::optional<double> sdot_l1,
                                 double rho, std::size_t n, std::size_t mu, std::size_t nu,
                                 SigmaMode mode);

struct OracleBound {
  double factor = 0.0;
  double additive = 0.0;
  double rhs = 0.0;
};

/// rhs = factor * oracle_risk + additive / n.
OracleBound oracle_bound(const OracleConstants& constants, double rho, std::size_t n,
                         double oracle_risk, BoundKind kind);

/// D_n(rho) for the default grid at horizon n.
double d_n_default_grid(const NoiseParams& noise, double sdot_l1, double rho, std::size_t n);

struct OracleReport {
  std::size_t n = 0;
  double rho = 0.0;
  SigmaMode sigma_mode = SigmaMode::kEstimated;
  BoundKind bound_kind = BoundKind::kBStar;
  std::vector<double> per_gamma_risk;  ///< grid order
  std::size_t oracle_index = 0;
  double oracle_risk = 0.0;
  std::optional<double> tail_bound;
  double selected_risk_mc = 0.0;
  double selected_risk_se = 0.0;
  std::vector<std::size_t> chosen_histogram;
  OracleConstants constants;
  OracleBound bound;
  bool holds = false;
};

/// Monte Carlo check of the oracle inequality:
/// holds = selected_risk_mc - 2 se <= rhs.
OracleReport verify_oracle(const SignalTruth& truth, const NoiseParams& noise, std::size_t n,
                           const WeightGrid& grid, const SelectionConfig& cfg,
                           const MonteCarloOptions& opts, BoundKind kind = BoundKind::kBStar);

/// Monte Carlo mean |sigma_hat_n - sigma*| and its standard error.
MeanSe sigma_hat_error_mc(const SignalTruth& truth, const NoiseParams& noise, std::size_t n,
                          const MonteCarloOptions& opts);

/// JSON text with every report field.
void write_report_json(std::ostream& out, const OracleReport& report, const WeightGrid& grid);

/// `n,rho,sigma_mode,oracle_risk,selected_risk,se,factor,additive,rhs,holds`
inline constexpr const char* kReportCsvHeader =
    "n,rho,sigma_mode,oracle_risk,selected_risk,se,factor,additive,rhs,holds";
std::string report_csv_row(const OracleReport& report);

}  // namespace perisem
