#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "perisem/rng.hpp"

namespace perisem {

/// Mark law of the compound Poisson component. Both have E Y = 0, E Y^2 = 1.
enum class JumpLaw { kRademacher, kStandardGaussian };

/// Parameters of xi_t = rho1 w_t + rho2 z_t with z a compound Poisson process
/// of intensity lambda.
class NoiseParams {
 public:
  /// Throws kInvalidParams unless |rho1| + |rho2| > 0 and lambda > 0.
  NoiseParams(double rho1, double rho2, double lambda, JumpLaw law);

  double rho1() const noexcept { return rho1_; }
  double rho2() const noexcept { return rho2_; }
  double lambda() const noexcept { return lambda_; }
  JumpLaw jump_law() const noexcept { return law_; }

  /// E Y^4 of the mark law: 1 (Rademacher) or 3 (Gaussian).
  double m4() const noexcept;

 private:
  double rho1_;
  double rho2_;
  double lambda_;
  JumpLaw law_;
};

/// Noise intensity rho1^2 + lambda rho2^2; equals E xi_{j,n}^2 for every j.
double sigma_star(const NoiseParams& p) noexcept;

/// Arrival times T_k in (0, n], strictly increasing, and their marks Y_k.
struct JumpRecord {
  std::vector<double> arrival_times;
  std::vector<double> marks;

  std::size_t size() const noexcept { return arrival_times.size(); }
};

JumpRecord sample_jumps(const NoiseParams& p, std::size_t n, Engine& rng);

struct CoefficientNoise {
  /// xi[j-1] = n^{-1/2} int_0^n phi_j d xi_s.
  std::vector<double> xi;
  JumpRecord jumps;
};

/// Exact draw of (xi_{j,n})_{j <= j_max}: rho1 g_j + rho2 n^{-1/2} sum_k phi_j(T_k) Y_k
/// with g_j i.i.d. N(0,1). Throws kBudget when j_max > n.
CoefficientNoise simulate_coefficient_noise(const NoiseParams& p, std::size_t n,
                                            std::size_t j_max, ReplicateRng& rng);

struct PathNoise {
  /// One increment per cell ((i-1)/s, i/s], s = steps_per_unit.
  std::vector<double> increments;
  JumpRecord jumps;
};

/// Discretized path: rho1 sqrt(1/s) g + rho2 (sum of marks arriving in the
/// cell). A jump on a grid boundary belongs to the cell it closes. Throws
/// kConfig when steps_per_unit < 8.
PathNoise simulate_path_increments(const NoiseParams& p, std::size_t n,
                                   std::size_t steps_per_unit, ReplicateRng& rng);

/// Index of the left-open cell ((i-1)/s, i/s] containing time t, clamped to
/// [0, cells).
std::size_t cell_index(double t, std::size_t steps_per_unit, std::size_t cells) noexcept;

/// CSV with header `k,T_k,Y_k`, k 1-based.
void write_jump_csv(std::ostream& out, const JumpRecord& jumps);
JumpRecord read_jump_csv(std::istream& in);

}  // namespace perisem
