#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace perisem {

/// Grid label alpha = (beta, t) with t = t_index * epsilon. Ordered
/// lexicographically by (beta, t_index).
struct Alpha {
  int beta = 1;
  int t_index = 1;
  double t = 1.0;

  friend bool operator==(const Alpha& a, const Alpha& b) {
    return a.beta == b.beta && a.t_index == b.t_index;
  }
  friend std::strong_ordering operator<=>(const Alpha& a, const Alpha& b) {
    if (auto c = a.beta <=> b.beta; c != 0) return c;
    return a.t_index <=> b.t_index;
  }
};

std::string to_string(const Alpha& alpha);

struct WeightSummaries {
  std::size_t count = 0;  ///< #(gamma): number of nonzero weights
  double sq_norm = 0.0;   ///< |gamma|^2
  double l_sum = 0.0;     ///< L(gamma) = sum gamma(j)
};

/// Weights gamma(1..support_end()); entries beyond are zero.
class WeightSequence {
 public:
  /// Throws kInvalidParams unless every value lies in [0, 1].
  explicit WeightSequence(std::vector<double> values,
                          std::optional<Alpha> label = std::nullopt);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t support_end() const noexcept { return values_.size(); }
  const std::optional<Alpha>& label() const noexcept { return label_; }

  /// gamma(j) for any j >= 1 (zero past the stored range).
  double operator()(std::size_t j) const noexcept {
    return j >= 1 && j <= values_.size() ? values_[j - 1] : 0.0;
  }

  /// Largest j with gamma(j) > 0, or 0 for the zero sequence.
  std::size_t last_nonzero() const noexcept;

  const WeightSummaries& summaries() const noexcept { return summaries_; }

 private:
  std::vector<double> values_;
  std::optional<Alpha> label_;
  WeightSummaries summaries_;
};

WeightSummaries weight_summaries(const WeightSequence& g);

/// tau_beta = (beta+1)(2 beta+1) / (pi^{2 beta} beta). Throws for beta < 1.
double tau_beta(int beta);

/// omega_alpha = (tau_beta t n)^{1/(2 beta + 1)}.
double omega_alpha(int beta, double t, std::size_t n);

/// j0 = [omega / ln n].
std::size_t pinsker_j0(double omega, std::size_t n);

/// gamma_alpha(j) = 1{j <= j0} + (1 - (j/omega)^beta) 1{j0 < j <= omega}.
/// Throws kHorizonTooSmall for n < 2.
double pinsker_weight(const Alpha& alpha, std::size_t n, std::size_t j);

/// Pinsker sequence for alpha, truncated at j <= n.
WeightSequence pinsker_sequence(const Alpha& alpha, std::size_t n);

/// The finite family Gamma indexed by {1..k*} x {eps, 2 eps, ..., m eps}.
class WeightGrid {
 public:
  /// Defaults: eps = 1/ln(n+1), k* = ceil(sqrt(ln(n+1))). Throws kHorizonTooSmall
  /// for n < 2 and kConfig for eps outside (0, 1] or k* < 1. Members whose
  /// support would be empty are dropped and listed in dropped().
  static WeightGrid build(std::size_t n, std::optional<int> k_star = std::nullopt,
                          std::optional<double> epsilon = std::nullopt);

  /// An explicit family (not necessarily Pinsker). Throws kConfig if empty.
  static WeightGrid from_members(std::size_t n, std::vector<WeightSequence> members);

  std::size_t n() const noexcept { return n_; }
  int k_star() const noexcept { return k_star_; }
  double epsilon() const noexcept { return epsilon_; }
  int m() const noexcept { return m_; }

  const std::vector<WeightSequence>& members() const noexcept { return members_; }
  const std::vector<Alpha>& dropped() const noexcept { return dropped_; }

  /// nu = card(Gamma).
  std::size_t nu() const noexcept { return members_.size(); }
  /// mu = max #(gamma) over Gamma.
  std::size_t mu() const noexcept;

 private:
  std::size_t n_ = 0;
  int k_star_ = 0;
  double epsilon_ = 0.0;
  int m_ = 0;
  std::vector<WeightSequence> members_;
  std::vector<Alpha> dropped_;
};

double default_epsilon(std::size_t n);
int default_k_star(std::size_t n);

/// CSV with header `beta,t,omega,j0,support,sq_norm`.
void write_grid_csv(std::ostream& out, const WeightGrid& grid);

}  // namespace perisem
