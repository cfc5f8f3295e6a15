#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "perisem/noise.hpp"
#include "perisem/rng.hpp"
#include "perisem/signal.hpp"
#include "perisem/weights.hpp"

namespace perisem {

/// theta_hat_{j,n} for j = 1..j_max.
class CoefficientEstimates {
 public:
  /// Throws kBudget if values.size() > n and kInvalidParams on non-finite
  /// entries or n == 0.
  CoefficientEstimates(std::vector<double> values, std::size_t n);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t j_max() const noexcept { return values_.size(); }

  double operator()(std::size_t j) const noexcept {
    return j >= 1 && j <= values_.size() ? values_[j - 1] : 0.0;
  }

 private:
  std::vector<double> values_;
  std::size_t n_;
};

/// Increments of y over the uniform grid of [0, n] with steps_per_unit cells
/// per period.
struct PathObservation {
  std::vector<double> increments;
  std::size_t steps_per_unit = 0;
  std::size_t n = 0;

  /// Throws kFormat unless increments.size() == n * steps_per_unit > 0.
  void validate() const;
};

/// Left-point Riemann-Stieltjes sum of (1/n) int_0^n phi_j dy.
CoefficientEstimates estimate_coefficients_from_path(const PathObservation& obs,
                                                     std::size_t j_max);

/// theta_hat_j = theta_j + xi_j / sqrt(n), with theta the true coefficients
/// (theta.size() >= xi.size(); extra entries ignored).
CoefficientEstimates estimate_coefficients_exact(std::span<const double> theta,
                                                 std::span<const double> xi, std::size_t n);
CoefficientEstimates estimate_coefficients_exact(const SignalSpec& s,
                                                 std::span<const double> xi, std::size_t n);

/// S_hat_gamma as a coefficient-form signal. Throws kBudget if gamma has a
/// nonzero weight past est.j_max().
SignalSpec weighted_estimate(const WeightSequence& gamma, const CoefficientEstimates& est);

/// Er_n(gamma) = sum_{j<=j_max} (gamma(j) theta_hat_j - theta_j)^2
///             + sum_{j_max<j<=j_tail} theta_j^2,   j_tail = theta.size().
/// Throws kInsufficientCoefficients if theta.size() < est.j_max().
double empirical_error(const WeightSequence& gamma, const CoefficientEstimates& est,
                       std::span<const double> theta);
double empirical_error(const WeightSequence& gamma, const CoefficientEstimates& est,
                       const SignalSpec& s, std::size_t j_tail);

/// Default j_tail: max(j_max, 512).
inline constexpr std::size_t kDefaultTail = 512;
std::size_t default_tail(std::size_t j_max);

/// Noise-free increments of int S dt over each cell (midpoint rule).
std::vector<double> signal_increments(const SignalSpec& s, std::size_t n,
                                      std::size_t steps_per_unit);

struct SimulatedPath {
  PathObservation observation;
  JumpRecord jumps;
};

/// dy = S dt + d xi on the grid.
SimulatedPath simulate_observation(const SignalSpec& s, const NoiseParams& p, std::size_t n,
                                   std::size_t steps_per_unit, ReplicateRng& rng);

/// Concatenates per-period segments (each n = 1) into one path of horizon
/// segments.size(). Throws kFormat on empty input or mismatched grids.
PathObservation segments_to_path(std::span<const PathObservation> segments);

/// Inverse of segments_to_path.
std::vector<PathObservation> split_path(const PathObservation& obs);

/// CSV `j,theta_hat`.
void write_estimates_csv(std::ostream& out, const CoefficientEstimates& est);
CoefficientEstimates read_estimates_csv(std::istream& in, std::size_t n);

/// CSV `cell,t_end,dy`; cell is 0-based, t_end = (cell+1)/steps_per_unit.
void write_path_csv(std::ostream& out, const PathObservation& obs);
PathObservation read_path_csv(std::istream& in);

}  // namespace perisem
