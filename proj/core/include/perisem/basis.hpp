#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace perisem::basis {

/// Fractional part {t} = t - floor(t), in [0, 1).
double frac(double t) noexcept;

/// Trigonometric orthonormal basis on [0,1]:
///   phi_1 = 1,  phi_j(t) = sqrt(2) cos(2 pi [j/2] t)  (j even),
///               phi_j(t) = sqrt(2) sin(2 pi [j/2] t)  (j odd, j >= 3).
/// `t` is reduced modulo 1 first. Throws kInvalidIndex for j == 0.
double phi(std::size_t j, double t);

/// d/dt phi_j(t).
double phi_derivative(std::size_t j, double t);

/// Fills out[j-1] = phi_j(t) for j = 1..out.size() using an angle-addition
/// recurrence re-anchored every 256 frequencies; agrees with phi() to ~1e-13.
void phi_all(double t, std::span<double> out);

/// Composite-midpoint approximation of the L2[0,1] inner product of phi_i and
/// phi_j. quad_points must be >= 64.
double gram(std::size_t i, std::size_t j, std::size_t quad_points);

/// Row-major j_max x j_max Gram matrix on the same midpoint grid.
std::vector<double> gram_matrix(std::size_t j_max, std::size_t quad_points);

}  // namespace perisem::basis
