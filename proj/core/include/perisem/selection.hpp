#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "perisem/estimator.hpp"
#include "perisem/signal.hpp"
#include "perisem/weights.hpp"

namespace perisem {

enum class SigmaMode { kKnown, kEstimated };

const char* to_string(SigmaMode mode) noexcept;

/// Penalty factor rho in (0, 1/3) plus how sigma is obtained.
class SelectionConfig {
 public:
  static constexpr double kDefaultRho = 0.1;

  /// Throws kConfig unless 0 < rho < 1/3.
  static SelectionConfig known(double sigma, double rho = kDefaultRho);
  static SelectionConfig estimated(double rho = kDefaultRho);

  double rho() const noexcept { return rho_; }
  SigmaMode mode() const noexcept { return mode_; }
  /// The known sigma; only meaningful in kKnown mode.
  double known_sigma() const noexcept { return sigma_; }

 private:
  SelectionConfig(double rho, SigmaMode mode, double sigma);

  double rho_;
  SigmaMode mode_;
  double sigma_;
};

/// Throws kConfig unless 0 < rho < 1/3.
void validate_rho(double rho);

/// sigma_hat_n = sum_{j=l}^{n} theta_hat_j^2 with l = [sqrt n] + 1.
/// Throws kHorizonTooSmall for n < 4, kInsufficientCoefficients if j_max < n.
double sigma_hat(const CoefficientEstimates& est);

/// l = [sqrt n] + 1, computed in integers.
std::size_t sigma_hat_start(std::size_t n);

/// theta_tilde_j = theta_hat_j^2 - sigma/n.
std::vector<double> theta_tilde(const CoefficientEstimates& est, double sigma_used);

/// sigma |gamma|^2 / n.
double penalty(const WeightSequence& gamma, std::size_t n, double sigma_used);

/// J_n(gamma) = sum gamma^2 theta_hat^2 - 2 sum gamma theta_tilde + rho P(gamma).
/// Throws kConfig for invalid rho, kBudget if gamma reaches past j_max.
double cost(const WeightSequence& gamma, const CoefficientEstimates& est, double rho,
            double sigma_used);

struct SelectionResult {
  std::size_t chosen_index = 0;
  WeightSequence chosen;
  std::vector<double> cost_table;  ///< J_n per grid member, grid order
  double sigma_used = 0.0;
  SignalSpec estimate;
};

/// gamma_hat = argmin over the grid; ties go to the smallest (beta, t) label
/// (unlabelled members: smallest grid index).
SelectionResult select(const CoefficientEstimates& est, const WeightGrid& grid,
                       const SelectionConfig& cfg);

/// Index of the minimizer of `costs` under the tie-break rule.
std::size_t argmin_with_tiebreak(std::span<const double> costs, const WeightGrid& grid);

/// Structured JSON text: chosen alpha, sigma, cost table and S_hat coefficients.
void write_selection_json(std::ostream& out, const SelectionResult& result,
                          const WeightGrid& grid, const SelectionConfig& cfg);

}  // namespace perisem
