#include "perisem/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "perisem/basis.hpp"
#include "perisem/csv.hpp"
#include "perisem/errors.hpp"

namespace perisem {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kReanchorEvery = 256;
constexpr std::size_t kLanes = 4;
constexpr std::size_t kBlock = 128;

double draw_mark(JumpLaw law, Engine& rng) {
  switch (law) {
    case JumpLaw::kRademacher: {
      std::bernoulli_distribution coin(0.5);
      return coin(rng) ? 1.0 : -1.0;
    }
    case JumpLaw::kStandardGaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      return normal(rng);
    }
  }
  return 0.0;
}

// out[j-1] += sum_k Y_k phi_j(T_k) for j = 1..out.size(). Jumps are processed
// in cache-sized blocks; within a block the rotation state of every jump
// advances one frequency at a time so the inner loop runs over jumps.
void accumulate_block(std::span<const double> times, std::span<const double> marks,
                      std::span<double> out) {
  const std::size_t count = times.size();
  double u[kBlock], step_c[kBlock], step_s[kBlock], c[kBlock], s[kBlock], y[kBlock];
  double mark_sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    u[k] = basis::frac(times[k]);
    step_c[k] = std::cos(kTwoPi * u[k]);
    step_s[k] = std::sin(kTwoPi * u[k]);
    c[k] = 1.0;
    s[k] = 0.0;
    y[k] = marks[k];
    mark_sum += y[k];
  }
  // Pad to a whole number of lanes with zero-mark dummies.
  const std::size_t padded = (count + kLanes - 1) / kLanes * kLanes;
  for (std::size_t k = count; k < padded; ++k) {
    u[k] = 0.0;
    step_c[k] = 1.0;
    step_s[k] = 0.0;
    c[k] = 1.0;
    s[k] = 0.0;
    y[k] = 0.0;
  }
  out[0] += mark_sum;
  for (std::size_t p = 1; 2 * p - 1 < out.size(); ++p) {
    double lane_c[kLanes] = {};
    double lane_s[kLanes] = {};
    if (p % kReanchorEvery == 0) {
      const double freq = kTwoPi * static_cast<double>(p);
      for (std::size_t k = 0; k < padded; ++k) {
        c[k] = std::cos(freq * u[k]);
        s[k] = std::sin(freq * u[k]);
      }
      for (std::size_t k = 0; k < padded; k += kLanes) {
        for (std::size_t l = 0; l < kLanes; ++l) {
          lane_c[l] += y[k + l] * c[k + l];
          lane_s[l] += y[k + l] * s[k + l];
        }
      }
    } else {
      // Fixed lane assignment keeps the summation order deterministic.
      for (std::size_t k = 0; k < padded; k += kLanes) {
        for (std::size_t l = 0; l < kLanes; ++l) {
          const double nc = c[k + l] * step_c[k + l] - s[k + l] * step_s[k + l];
          const double ns = s[k + l] * step_c[k + l] + c[k + l] * step_s[k + l];
          c[k + l] = nc;
          s[k + l] = ns;
          lane_c[l] += y[k + l] * nc;
          lane_s[l] += y[k + l] * ns;
        }
      }
    }
    const double acc_c = (lane_c[0] + lane_c[1]) + (lane_c[2] + lane_c[3]);
    const double acc_s = (lane_s[0] + lane_s[1]) + (lane_s[2] + lane_s[3]);
    out[2 * p - 1] += std::numbers::sqrt2 * acc_c;
    if (2 * p < out.size()) out[2 * p] += std::numbers::sqrt2 * acc_s;
  }
}

void accumulate_jump_projections(const JumpRecord& jumps, std::span<double> out) {
  if (out.empty()) return;
  const std::span<const double> times = jumps.arrival_times;
  const std::span<const double> marks = jumps.marks;
  for (std::size_t begin = 0; begin < jumps.size(); begin += kBlock) {
    const std::size_t len = std::min(kBlock, jumps.size() - begin);
    accumulate_block(times.subspan(begin, len), marks.subspan(begin, len), out);
  }
}

}  // namespace

NoiseParams::NoiseParams(double rho1, double rho2, double lambda, JumpLaw law)
    : rho1_(rho1), rho2_(rho2), lambda_(lambda), law_(law) {
  if (!std::isfinite(rho1) || !std::isfinite(rho2) || !(std::abs(rho1) + std::abs(rho2) > 0.0)) {
    throw Error(ErrorKind::kInvalidParams, "noise needs |rho1| + |rho2| > 0");
  }
  if (!std::isfinite(lambda) || !(lambda > 0.0)) {
    throw Error(ErrorKind::kInvalidParams, "jump intensity lambda must be > 0");
  }
}

double NoiseParams::m4() const noexcept {
  return law_ == JumpLaw::kRademacher ? 1.0 : 3.0;
}

double sigma_star(const NoiseParams& p) noexcept {
  return p.rho1() * p.rho1() + p.lambda() * p.rho2() * p.rho2();
}

JumpRecord sample_jumps(const NoiseParams& p, std::size_t n, Engine& rng) {
  if (n == 0) throw Error(ErrorKind::kHorizonTooSmall, "horizon n must be >= 1");
  JumpRecord record;
  std::exponential_distribution<double> gap(p.lambda());
  const double horizon = static_cast<double>(n);
  double t = 0.0;
  for (;;) {
    t += gap(rng);
    if (t > horizon) break;
    // Zero-length gaps would break strict monotonicity; they have probability
    // zero but can occur after rounding.
    if (!record.arrival_times.empty() && t <= record.arrival_times.back()) continue;
    record.arrival_times.push_back(t);
  }
  record.marks.reserve(record.arrival_times.size());
  for (std::size_t k = 0; k < record.arrival_times.size(); ++k) {
    record.marks.push_back(draw_mark(p.jump_law(), rng));
  }
  return record;
}

CoefficientNoise simulate_coefficient_noise(const NoiseParams& p, std::size_t n,
                                            std::size_t j_max, ReplicateRng& rng) {
  if (n == 0) throw Error(ErrorKind::kHorizonTooSmall, "horizon n must be >= 1");
  if (j_max > n) {
    throw Error(ErrorKind::kBudget, "j_max " + std::to_string(j_max) +
                                        " exceeds horizon n " + std::to_string(n));
  }
  CoefficientNoise out;
  out.jumps = sample_jumps(p, n, rng.jumps);
  out.xi.assign(j_max, 0.0);
  if (p.rho2() != 0.0) {
    accumulate_jump_projections(out.jumps, out.xi);
    const double scale = p.rho2() / std::sqrt(static_cast<double>(n));
    for (double& v : out.xi) v *= scale;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out.xi) {
    const double g = normal(rng.brownian);
    v += p.rho1() * g;
  }
  return out;
}

PathNoise simulate_path_increments(const NoiseParams& p, std::size_t n,
                                   std::size_t steps_per_unit, ReplicateRng& rng) {
  if (n == 0) throw Error(ErrorKind::kHorizonTooSmall, "horizon n must be >= 1");
  if (steps_per_unit < 8) {
    throw Error(ErrorKind::kConfig, "steps_per_unit must be >= 8");
  }
  PathNoise out;
  out.jumps = sample_jumps(p, n, rng.jumps);
  const std::size_t cells = n * steps_per_unit;
  out.increments.resize(cells);
  const double scale = p.rho1() * std::sqrt(1.0 / static_cast<double>(steps_per_unit));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out.increments) v = scale * normal(rng.brownian);
  for (std::size_t k = 0; k < out.jumps.size(); ++k) {
    const std::size_t idx = cell_index(out.jumps.arrival_times[k], steps_per_unit, cells);
    out.increments[idx] += p.rho2() * out.jumps.marks[k];
  }
  return out;
}

std::size_t cell_index(double t, std::size_t steps_per_unit, std::size_t cells) noexcept {
  const double cell_end = std::ceil(t * static_cast<double>(steps_per_unit));
  const auto closing = static_cast<std::size_t>(std::max(cell_end, 1.0));
  return std::min(cells, closing) - 1;
}

void write_jump_csv(std::ostream& out, const JumpRecord& jumps) {
  out << "k,T_k,Y_k\n";
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    out << (k + 1) << ',' << csv::format_double(jumps.arrival_times[k]) << ','
        << csv::format_double(jumps.marks[k]) << '\n';
  }
}

JumpRecord read_jump_csv(std::istream& in) {
  JumpRecord record;
  const auto rows = csv::read_table(in, "k,T_k,Y_k");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (csv::parse_int(rows[i][0]) != static_cast<long long>(i + 1)) {
      throw Error(ErrorKind::kFormat, "jump CSV indices must be 1..K in order");
    }
    const double t = csv::parse_double(rows[i][1]);
    if (!(t > 0.0) || (!record.arrival_times.empty() && t <= record.arrival_times.back())) {
      throw Error(ErrorKind::kFormat, "jump arrivals must be positive and strictly increasing");
    }
    record.arrival_times.push_back(t);
    record.marks.push_back(csv::parse_double(rows[i][2]));
  }
  return record;
}

}  // namespace perisem
