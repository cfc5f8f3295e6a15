#include "perisem/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "perisem/csv.hpp"
#include "perisem/errors.hpp"

namespace perisem {

std::string to_string(const Alpha& alpha) {
  return "(" + std::to_string(alpha.beta) + "," + csv::format_double(alpha.t) + ")";
}

WeightSequence::WeightSequence(std::vector<double> values, std::optional<Alpha> label)
    : values_(std::move(values)), label_(label) {
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::kInvalidParams, "weights must lie in [0, 1]");
    }
  }
  summaries_ = weight_summaries(*this);
}

std::size_t WeightSequence::last_nonzero() const noexcept {
  for (std::size_t j = values_.size(); j > 0; --j) {
    if (values_[j - 1] > 0.0) return j;
  }
  return 0;
}

WeightSummaries weight_summaries(const WeightSequence& g) {
  WeightSummaries s;
  for (double v : g.values()) {
    if (v > 0.0) ++s.count;
    s.sq_norm += v * v;
    s.l_sum += v;
  }
  return s;
}

double tau_beta(int beta) {
  if (beta < 1) throw Error(ErrorKind::kInvalidIndex, "beta must be >= 1");
  const double b = beta;
  return (b + 1.0) * (2.0 * b + 1.0) / (std::pow(std::numbers::pi, 2.0 * b) * b);
}

double omega_alpha(int beta, double t, std::size_t n) {
  if (!(t > 0.0)) throw Error(ErrorKind::kInvalidParams, "t must be > 0");
  if (n == 0) throw Error(ErrorKind::kHorizonTooSmall, "n must be >= 1");
  return std::pow(tau_beta(beta) * t * static_cast<double>(n), 1.0 / (2.0 * beta + 1.0));
}

std::size_t pinsker_j0(double omega, std::size_t n) {
  return static_cast<std::size_t>(std::floor(omega / std::log(static_cast<double>(n))));
}

double pinsker_weight(const Alpha& alpha, std::size_t n, std::size_t j) {
  if (n < 2) throw Error(ErrorKind::kHorizonTooSmall, "Pinsker weights need n >= 2");
  if (j == 0) throw Error(ErrorKind::kInvalidIndex, "j must be >= 1");
  const double omega = omega_alpha(alpha.beta, alpha.t, n);
  const std::size_t j0 = pinsker_j0(omega, n);
  if (j <= j0) return 1.0;
  const double x = static_cast<double>(j);
  if (x > omega) return 0.0;
  return 1.0 - std::pow(x / omega, alpha.beta);
}

WeightSequence pinsker_sequence(const Alpha& alpha, std::size_t n) {
  if (n < 2) throw Error(ErrorKind::kHorizonTooSmall, "Pinsker weights need n >= 2");
  const double omega = omega_alpha(alpha.beta, alpha.t, n);
  const auto end = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor(omega)));
  std::vector<double> values(end);
  for (std::size_t j = 1; j <= end; ++j) values[j - 1] = pinsker_weight(alpha, n, j);
  while (!values.empty() && values.back() == 0.0) values.pop_back();
  return WeightSequence(std::move(values), alpha);
}

double default_epsilon(std::size_t n) {
  return 1.0 / std::log(static_cast<double>(n) + 1.0);
}

int default_k_star(std::size_t n) {
  const double k = std::ceil(std::sqrt(std::log(static_cast<double>(n) + 1.0)));
  return std::max(1, static_cast<int>(k));
}

WeightGrid WeightGrid::build(std::size_t n, std::optional<int> k_star,
                             std::optional<double> epsilon) {
  if (n < 2) throw Error(ErrorKind::kHorizonTooSmall, "weight grid needs n >= 2");
  WeightGrid grid;
  grid.n_ = n;
  grid.epsilon_ = epsilon.value_or(default_epsilon(n));
  if (!(grid.epsilon_ > 0.0 && grid.epsilon_ <= 1.0)) {
    throw Error(ErrorKind::kConfig, "epsilon must lie in (0, 1]");
  }
  grid.k_star_ = k_star.value_or(default_k_star(n));
  if (grid.k_star_ < 1) throw Error(ErrorKind::kConfig, "k_star must be >= 1");
  // m = [1/eps^2]; the slack absorbs rounding in e.g. 1/(0.1*0.1).
  grid.m_ = static_cast<int>(std::floor(1.0 / (grid.epsilon_ * grid.epsilon_) + 1e-9));
  for (int beta = 1; beta <= grid.k_star_; ++beta) {
    for (int i = 1; i <= grid.m_; ++i) {
      const Alpha alpha{beta, i, i * grid.epsilon_};
      WeightSequence seq = pinsker_sequence(alpha, n);
      if (seq.summaries().count == 0) {
        grid.dropped_.push_back(alpha);
        continue;
      }
      grid.members_.push_back(std::move(seq));
    }
  }
  return grid;
}

WeightGrid WeightGrid::from_members(std::size_t n, std::vector<WeightSequence> members) {
  if (members.empty()) throw Error(ErrorKind::kConfig, "weight family is empty");
  for (const auto& g : members) {
    if (g.summaries().count == 0 || g.summaries().count > n) {
      throw Error(ErrorKind::kBudget, "every member needs 0 < #(gamma) <= n");
    }
  }
  WeightGrid grid;
  grid.n_ = n;
  grid.members_ = std::move(members);
  return grid;
}

std::size_t WeightGrid::mu() const noexcept {
  std::size_t mu = 0;
  for (const auto& g : members_) mu = std::max(mu, g.summaries().count);
  return mu;
}

void write_grid_csv(std::ostream& out, const WeightGrid& grid) {
  out << "beta,t,omega,j0,support,sq_norm\n";
  for (const auto& g : grid.members()) {
    if (!g.label()) continue;
    const Alpha& a = *g.label();
    const double omega = omega_alpha(a.beta, a.t, grid.n());
    out << a.beta << ',' << csv::format_double(a.t) << ',' << csv::format_double(omega) << ','
        << pinsker_j0(omega, grid.n()) << ',' << g.summaries().count << ','
        << csv::format_double(g.summaries().sq_norm) << '\n';
  }
}

}  // namespace perisem
