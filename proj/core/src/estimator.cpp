#include "perisem/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "perisem/basis.hpp"
#include "perisem/csv.hpp"
#include "perisem/errors.hpp"

namespace perisem {

CoefficientEstimates::CoefficientEstimates(std::vector<double> values, std::size_t n)
    : values_(std::move(values)), n_(n) {
  if (n_ == 0) throw Error(ErrorKind::kInvalidParams, "horizon n must be >= 1");
  if (values_.size() > n_) {
    throw Error(ErrorKind::kBudget, "j_max " + std::to_string(values_.size()) +
                                        " exceeds horizon n " + std::to_string(n_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidParams, "non-finite estimate");
  }
}

void PathObservation::validate() const {
  if (n == 0 || steps_per_unit == 0) {
    throw Error(ErrorKind::kFormat, "path needs n >= 1 and steps_per_unit >= 1");
  }
  if (increments.size() != n * steps_per_unit) {
    throw Error(ErrorKind::kFormat, "path has " + std::to_string(increments.size()) +
                                        " increments, want n * steps_per_unit = " +
                                        std::to_string(n * steps_per_unit));
  }
}

CoefficientEstimates estimate_coefficients_from_path(const PathObservation& obs,
                                                     std::size_t j_max) {
  obs.validate();
  if (j_max > obs.n) {
    throw Error(ErrorKind::kBudget, "j_max " + std::to_string(j_max) +
                                        " exceeds horizon n " + std::to_string(obs.n));
  }
  const std::size_t steps = obs.steps_per_unit;
  // phi_j is 1-periodic and the grid has an integer number of cells per
  // period, so increments can be folded by phase first.
  std::vector<double> folded(steps, 0.0);
  for (std::size_t k = 0; k < obs.increments.size(); ++k) folded[k % steps] += obs.increments[k];

  std::vector<double> values(j_max, 0.0);
  std::vector<double> phis(j_max);
  for (std::size_t i = 0; i < steps; ++i) {
    basis::phi_all(static_cast<double>(i) / static_cast<double>(steps), phis);
    for (std::size_t j = 0; j < j_max; ++j) values[j] += phis[j] * folded[i];
  }
  const double inv_n = 1.0 / static_cast<double>(obs.n);
  for (double& v : values) v *= inv_n;
  return CoefficientEstimates(std::move(values), obs.n);
}

CoefficientEstimates estimate_coefficients_exact(std::span<const double> theta,
                                                 std::span<const double> xi, std::size_t n) {
  if (theta.size() < xi.size()) {
    throw Error(ErrorKind::kInsufficientCoefficients,
                "need true coefficients up to j = " + std::to_string(xi.size()));
  }
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> values(xi.size());
  for (std::size_t j = 0; j < xi.size(); ++j) values[j] = theta[j] + xi[j] * inv_sqrt_n;
  return CoefficientEstimates(std::move(values), n);
}

CoefficientEstimates estimate_coefficients_exact(const SignalSpec& s,
                                                 std::span<const double> xi, std::size_t n) {
  if (xi.empty()) return CoefficientEstimates({}, n);
  const auto theta = fourier_coefficients(s, xi.size());
  return estimate_coefficients_exact(theta, xi, n);
}

SignalSpec weighted_estimate(const WeightSequence& gamma, const CoefficientEstimates& est) {
  if (gamma.last_nonzero() > est.j_max()) {
    throw Error(ErrorKind::kBudget, "weight support exceeds available estimates");
  }
  std::vector<double> theta(std::max<std::size_t>(gamma.last_nonzero(), 1), 0.0);
  for (std::size_t j = 1; j <= gamma.last_nonzero(); ++j) theta[j - 1] = gamma(j) * est(j);
  return SignalSpec::coefficients("weighted-estimate", std::move(theta));
}

double empirical_error(const WeightSequence& gamma, const CoefficientEstimates& est,
                       std::span<const double> theta) {
  if (theta.size() < est.j_max()) {
    throw Error(ErrorKind::kInsufficientCoefficients,
                "true coefficients must extend at least to j_max");
  }
  if (gamma.last_nonzero() > est.j_max()) {
    throw Error(ErrorKind::kBudget, "weight support exceeds available estimates");
  }
  double sum = 0.0;
  for (std::size_t j = 1; j <= est.j_max(); ++j) {
    const double d = gamma(j) * est(j) - theta[j - 1];
    sum += d * d;
  }
  for (std::size_t j = est.j_max() + 1; j <= theta.size(); ++j) sum += theta[j - 1] * theta[j - 1];
  return sum;
}

double empirical_error(const WeightSequence& gamma, const CoefficientEstimates& est,
                       const SignalSpec& s, std::size_t j_tail) {
  const auto theta = fourier_coefficients(s, std::max(j_tail, est.j_max()));
  return empirical_error(gamma, est, theta);
}

std::size_t default_tail(std::size_t j_max) { return std::max(j_max, kDefaultTail); }

std::vector<double> signal_increments(const SignalSpec& s, std::size_t n,
                                      std::size_t steps_per_unit) {
  if (n == 0 || steps_per_unit == 0) {
    throw Error(ErrorKind::kConfig, "need n >= 1 and steps_per_unit >= 1");
  }
  const double h = 1.0 / static_cast<double>(steps_per_unit);
  std::vector<double> period(steps_per_unit);
  for (std::size_t i = 0; i < steps_per_unit; ++i) {
    period[i] = eval(s, (static_cast<double>(i) + 0.5) * h) * h;
  }
  std::vector<double> out;
  out.reserve(n * steps_per_unit);
  for (std::size_t k = 0; k < n; ++k) out.insert(out.end(), period.begin(), period.end());
  return out;
}

SimulatedPath simulate_observation(const SignalSpec& s, const NoiseParams& p, std::size_t n,
                                   std::size_t steps_per_unit, ReplicateRng& rng) {
  PathNoise noise = simulate_path_increments(p, n, steps_per_unit, rng);
  const auto drift = signal_increments(s, n, steps_per_unit);
  for (std::size_t k = 0; k < drift.size(); ++k) noise.increments[k] += drift[k];
  return SimulatedPath{PathObservation{std::move(noise.increments), steps_per_unit, n},
                       std::move(noise.jumps)};
}

PathObservation segments_to_path(std::span<const PathObservation> segments) {
  if (segments.empty()) throw Error(ErrorKind::kFormat, "no segments to concatenate");
  const std::size_t steps = segments.front().steps_per_unit;
  PathObservation out;
  out.steps_per_unit = steps;
  out.n = segments.size();
  out.increments.reserve(steps * segments.size());
  for (const auto& seg : segments) {
    seg.validate();
    if (seg.n != 1) throw Error(ErrorKind::kFormat, "each segment must span one period");
    if (seg.steps_per_unit != steps) {
      throw Error(ErrorKind::kFormat, "segments have mismatched grids");
    }
    // y_t = y_{k-1} + x^k_{t-k+1} - x_0: increments of y on [k-1, k] are the
    // increments of x^k.
    out.increments.insert(out.increments.end(), seg.increments.begin(), seg.increments.end());
  }
  return out;
}

std::vector<PathObservation> split_path(const PathObservation& obs) {
  obs.validate();
  std::vector<PathObservation> out;
  out.reserve(obs.n);
  const auto steps = static_cast<std::ptrdiff_t>(obs.steps_per_unit);
  for (std::size_t k = 0; k < obs.n; ++k) {
    const auto begin = obs.increments.begin() + static_cast<std::ptrdiff_t>(k) * steps;
    out.push_back(PathObservation{std::vector<double>(begin, begin + steps), obs.steps_per_unit, 1});
  }
  return out;
}

void write_estimates_csv(std::ostream& out, const CoefficientEstimates& est) {
  out << "j,theta_hat\n";
  for (std::size_t j = 1; j <= est.j_max(); ++j) {
    out << j << ',' << csv::format_double(est(j)) << '\n';
  }
}

CoefficientEstimates read_estimates_csv(std::istream& in, std::size_t n) {
  const auto rows = csv::read_table(in, "j,theta_hat");
  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (csv::parse_int(rows[i][0]) != static_cast<long long>(i + 1)) {
      throw Error(ErrorKind::kFormat, "estimate CSV indices must be 1..j_max in order");
    }
    values.push_back(csv::parse_double(rows[i][1]));
  }
  return CoefficientEstimates(std::move(values), n);
}

void write_path_csv(std::ostream& out, const PathObservation& obs) {
  obs.validate();
  out << "cell,t_end,dy\n";
  const double steps = static_cast<double>(obs.steps_per_unit);
  for (std::size_t k = 0; k < obs.increments.size(); ++k) {
    out << k << ',' << csv::format_double(static_cast<double>(k + 1) / steps) << ','
        << csv::format_double(obs.increments[k]) << '\n';
  }
}

PathObservation read_path_csv(std::istream& in) {
  const auto rows = csv::read_table(in, "cell,t_end,dy");
  if (rows.empty()) throw Error(ErrorKind::kFormat, "path CSV has no rows");
  const double first_end = csv::parse_double(rows.front()[1]);
  if (!(first_end > 0.0 && first_end <= 1.0)) {
    throw Error(ErrorKind::kFormat, "path CSV: first t_end must lie in (0, 1]");
  }
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / first_end));
  if (steps == 0 || rows.size() % steps != 0) {
    throw Error(ErrorKind::kFormat, "path CSV does not cover a whole number of periods");
  }
  PathObservation obs;
  obs.steps_per_unit = steps;
  obs.n = rows.size() / steps;
  obs.increments.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (csv::parse_int(rows[k][0]) != static_cast<long long>(k)) {
      throw Error(ErrorKind::kFormat, "path CSV cells must be 0..N-1 in order");
    }
    const double expected = static_cast<double>(k + 1) / static_cast<double>(steps);
    if (std::abs(csv::parse_double(rows[k][1]) - expected) > 1e-9 * std::max(1.0, expected)) {
      throw Error(ErrorKind::kFormat, "path CSV row " + std::to_string(k) + ": grid mismatch");
    }
    obs.increments.push_back(csv::parse_double(rows[k][2]));
  }
  return obs;
}

}  // namespace perisem
