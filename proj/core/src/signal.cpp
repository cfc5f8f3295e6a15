#include "perisem/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>

#include "perisem/basis.hpp"
#include "perisem/csv.hpp"
#include "perisem/errors.hpp"

namespace perisem {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_quad(std::size_t quad_points) {
  if (quad_points == 0) throw Error(ErrorKind::kConfig, "quad_points must be positive");
}

double midpoint(std::size_t k, double h) { return (static_cast<double>(k) + 0.5) * h; }

}  // namespace

SignalSpec SignalSpec::analytic(std::string name, std::function<double(double)> value,
                                std::function<double(double)> derivative) {
  if (!value) throw Error(ErrorKind::kInvalidParams, "analytic signal needs a value function");
  return SignalSpec(std::move(name), AnalyticForm{std::move(value), std::move(derivative)});
}

SignalSpec SignalSpec::coefficients(std::string name, std::vector<double> theta) {
  if (theta.empty()) {
    throw Error(ErrorKind::kInvalidParams, "coefficient signal needs at least one coefficient");
  }
  for (double v : theta) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidParams, "non-finite coefficient");
  }
  return SignalSpec(std::move(name), CoefficientForm{std::move(theta)});
}

bool SignalSpec::is_coefficient_form() const noexcept {
  return std::holds_alternative<CoefficientForm>(form_);
}

bool SignalSpec::has_derivative() const noexcept {
  if (is_coefficient_form()) return true;
  return static_cast<bool>(std::get<AnalyticForm>(form_).derivative);
}

const AnalyticForm* SignalSpec::as_analytic() const noexcept {
  return std::get_if<AnalyticForm>(&form_);
}

const CoefficientForm* SignalSpec::as_coefficients() const noexcept {
  return std::get_if<CoefficientForm>(&form_);
}

SignalSpec& SignalSpec::with_sdot_l1(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::kInvalidParams, "|S'|_1 must be finite and nonnegative");
  }
  sdot_l1_ = value;
  return *this;
}

double eval(const SignalSpec& s, double t) {
  const double u = basis::frac(t);
  if (const auto* a = s.as_analytic()) return a->value(u);
  const auto& theta = s.as_coefficients()->theta;
  std::vector<double> phis(theta.size());
  basis::phi_all(u, phis);
  double sum = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) sum += theta[j] * phis[j];
  return sum;
}

double eval_derivative(const SignalSpec& s, double t) {
  const double u = basis::frac(t);
  if (const auto* a = s.as_analytic()) {
    if (!a->derivative) {
      throw Error(ErrorKind::kCapability, "signal '" + s.name() + "' has no derivative");
    }
    return a->derivative(u);
  }
  const auto& theta = s.as_coefficients()->theta;
  // phi'_{2p} = -2 pi p phi_{2p+1},  phi'_{2p+1} = 2 pi p phi_{2p}.
  std::vector<double> phis(theta.size() + 1);
  basis::phi_all(u, phis);
  double sum = 0.0;
  for (std::size_t j = 2; j <= theta.size(); ++j) {
    const double freq = kTwoPi * static_cast<double>(j / 2);
    const double d = j % 2 == 0 ? -freq * phis[j] : freq * phis[j - 2];
    sum += theta[j - 1] * d;
  }
  return sum;
}

std::vector<double> fourier_coefficients(const SignalSpec& s, std::size_t j_max,
                                         std::size_t quad_points) {
  if (j_max == 0) throw Error(ErrorKind::kInvalidIndex, "j_max must be >= 1");
  if (const auto* c = s.as_coefficients()) {
    std::vector<double> out(j_max, 0.0);
    const std::size_t copy = std::min(j_max, c->theta.size());
    std::copy_n(c->theta.begin(), copy, out.begin());
    return out;
  }
  require_quad(quad_points);
  const auto& value = s.as_analytic()->value;
  const double h = 1.0 / static_cast<double>(quad_points);
  std::vector<double> out(j_max, 0.0);
  std::vector<double> phis(j_max);
  for (std::size_t k = 0; k < quad_points; ++k) {
    const double t = midpoint(k, h);
    const double v = value(t);
    basis::phi_all(t, phis);
    for (std::size_t j = 0; j < j_max; ++j) out[j] += v * phis[j];
  }
  for (double& v : out) v *= h;
  return out;
}

double sdot_l1(const SignalSpec& s, std::size_t quad_points) {
  if (auto supplied = s.supplied_sdot_l1()) return *supplied;
  if (!s.has_derivative()) {
    throw Error(ErrorKind::kCapability, "signal '" + s.name() + "' has no derivative");
  }
  require_quad(quad_points);
  const double h = 1.0 / static_cast<double>(quad_points);
  double sum = 0.0;
  for (std::size_t k = 0; k < quad_points; ++k) {
    sum += std::abs(eval_derivative(s, midpoint(k, h)));
  }
  return sum * h;
}

double norm_sq(const SignalSpec& s, std::size_t quad_points) {
  if (const auto* c = s.as_coefficients()) {
    double sum = 0.0;
    for (double v : c->theta) sum += v * v;
    return sum;
  }
  require_quad(quad_points);
  const auto& value = s.as_analytic()->value;
  const double h = 1.0 / static_cast<double>(quad_points);
  double sum = 0.0;
  for (std::size_t k = 0; k < quad_points; ++k) {
    const double v = value(midpoint(k, h));
    sum += v * v;
  }
  return sum * h;
}

std::vector<std::string> catalogue_names() {
  return {"zero",     "single-mode",        "two-mode",  "sine",
          "parabola", "sine-plus-parabola", "poly-decay"};
}

std::optional<SignalSpec> catalogue(std::string_view name) {
  if (name == "zero") return SignalSpec::coefficients("zero", {0.0});
  if (name == "single-mode") return SignalSpec::coefficients("single-mode", {0.0, 1.0});
  if (name == "two-mode") {
    return SignalSpec::coefficients("two-mode", {0.0, 1.0, 0.0, 0.0, 0.3});
  }
  if (name == "sine") {
    return SignalSpec::analytic(
        "sine", [](double t) { return std::sin(kTwoPi * t); },
        [](double t) { return kTwoPi * std::cos(kTwoPi * t); });
  }
  if (name == "parabola") {
    return SignalSpec::analytic(
        "parabola", [](double t) { return t * (1.0 - t); },
        [](double t) { return 1.0 - 2.0 * t; });
  }
  if (name == "sine-plus-parabola") {
    return SignalSpec::analytic(
        "sine-plus-parabola",
        [](double t) { return std::sin(kTwoPi * t) + 0.3 * t * (1.0 - t); },
        [](double t) { return kTwoPi * std::cos(kTwoPi * t) + 0.3 * (1.0 - 2.0 * t); });
  }
  if (name == "poly-decay") {
    std::vector<double> theta(kPolyDecayTerms);
    double sq = 0.0;
    for (std::size_t j = 1; j <= kPolyDecayTerms; ++j) {
      const double v = 1.0 / (static_cast<double>(j) * static_cast<double>(j));
      theta[j - 1] = v;
      sq += v * v;
    }
    const double c = 1.0 / std::sqrt(sq);
    for (double& v : theta) v *= c;
    return SignalSpec::coefficients("poly-decay", std::move(theta));
  }
  return std::nullopt;
}

SignalSpec read_coefficient_file(std::istream& in, std::string name) {
  std::map<long long, double> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string j_text;
    std::string v_text;
    std::string extra;
    if (!(fields >> j_text)) continue;
    if (!(fields >> v_text) || (fields >> extra)) {
      throw Error(ErrorKind::kFormat,
                  "coefficient file line " + std::to_string(line_no) + ": want `j value`");
    }
    const long long j = csv::parse_int(j_text);
    if (j < 1) {
      throw Error(ErrorKind::kFormat,
                  "coefficient file line " + std::to_string(line_no) + ": index must be >= 1");
    }
    if (!entries.emplace(j, csv::parse_double(v_text)).second) {
      throw Error(ErrorKind::kFormat,
                  "coefficient file line " + std::to_string(line_no) + ": duplicate index");
    }
  }
  if (entries.empty()) throw Error(ErrorKind::kFormat, "coefficient file has no entries");
  std::vector<double> theta(static_cast<std::size_t>(entries.rbegin()->first), 0.0);
  for (const auto& [j, v] : entries) theta[static_cast<std::size_t>(j - 1)] = v;
  return SignalSpec::coefficients(std::move(name), std::move(theta));
}

SignalSpec load_coefficient_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open coefficient file " + path);
  return read_coefficient_file(in, path);
}

}  // namespace perisem
