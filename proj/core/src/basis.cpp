#include "perisem/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "perisem/errors.hpp"

namespace perisem::basis {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kReanchorEvery = 256;

void require_index(std::size_t j) {
  if (j == 0) {
    throw Error(ErrorKind::kInvalidIndex, "basis index must be >= 1");
  }
}

}  // namespace

double frac(double t) noexcept {
  const double f = t - std::floor(t);
  // t slightly below an integer can round up to exactly 1.
  return f >= 1.0 ? 0.0 : f;
}

double phi(std::size_t j, double t) {
  require_index(j);
  if (j == 1) return 1.0;
  const double angle = kTwoPi * static_cast<double>(j / 2) * frac(t);
  return j % 2 == 0 ? std::numbers::sqrt2 * std::cos(angle)
                    : std::numbers::sqrt2 * std::sin(angle);
}

double phi_derivative(std::size_t j, double t) {
  require_index(j);
  if (j == 1) return 0.0;
  const double freq = kTwoPi * static_cast<double>(j / 2);
  const double angle = freq * frac(t);
  return j % 2 == 0 ? -std::numbers::sqrt2 * freq * std::sin(angle)
                    : std::numbers::sqrt2 * freq * std::cos(angle);
}

void phi_all(double t, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  const double u = frac(t);
  const double c1 = std::cos(kTwoPi * u);
  const double s1 = std::sin(kTwoPi * u);
  double c = 1.0;
  double s = 0.0;
  for (std::size_t p = 1; 2 * p - 1 < out.size(); ++p) {
    if (p % kReanchorEvery == 0) {
      c = std::cos(kTwoPi * static_cast<double>(p) * u);
      s = std::sin(kTwoPi * static_cast<double>(p) * u);
    } else {
      const double next_c = c * c1 - s * s1;
      s = s * c1 + c * s1;
      c = next_c;
    }
    out[2 * p - 1] = std::numbers::sqrt2 * c;
    if (2 * p < out.size()) out[2 * p] = std::numbers::sqrt2 * s;
  }
}

double gram(std::size_t i, std::size_t j, std::size_t quad_points) {
  require_index(i);
  require_index(j);
  if (quad_points < 64) {
    throw Error(ErrorKind::kConfig, "gram: quad_points must be >= 64, got " +
                                        std::to_string(quad_points));
  }
  const double h = 1.0 / static_cast<double>(quad_points);
  double sum = 0.0;
  for (std::size_t k = 0; k < quad_points; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * h;
    sum += phi(i, t) * phi(j, t);
  }
  return sum * h;
}

std::vector<double> gram_matrix(std::size_t j_max, std::size_t quad_points) {
  if (quad_points < 64) {
    throw Error(ErrorKind::kConfig, "gram_matrix: quad_points must be >= 64");
  }
  const double h = 1.0 / static_cast<double>(quad_points);
  // Table of exact phi values, node-major.
  std::vector<double> table(quad_points * j_max);
  for (std::size_t k = 0; k < quad_points; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * h;
    for (std::size_t j = 1; j <= j_max; ++j) table[k * j_max + j - 1] = phi(j, t);
  }
  std::vector<double> g(j_max * j_max, 0.0);
  for (std::size_t k = 0; k < quad_points; ++k) {
    const double* row = &table[k * j_max];
    for (std::size_t a = 0; a < j_max; ++a) {
      const double va = row[a];
      for (std::size_t b = a; b < j_max; ++b) g[a * j_max + b] += va * row[b];
    }
  }
  for (std::size_t a = 0; a < j_max; ++a) {
    for (std::size_t b = a; b < j_max; ++b) {
      g[a * j_max + b] *= h;
      g[b * j_max + a] = g[a * j_max + b];
    }
  }
  return g;
}

}  // namespace perisem::basis
