#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace perisem {

/// Default number of midpoint nodes for quadratures over one period.
inline constexpr std::size_t kDefaultQuadPoints = 16384;

/// A 1-periodic function given in closed form on [0,1).
struct AnalyticForm {
  std::function<double(double)> value;
  /// Empty when the derivative is not available.
  std::function<double(double)> derivative;
};

/// A finite trigonometric series; theta[j-1] multiplies phi_j.
struct CoefficientForm {
  std::vector<double> theta;
};

/// The unknown 1-periodic target S.
class SignalSpec {
 public:
  static SignalSpec analytic(std::string name, std::function<double(double)> value,
                             std::function<double(double)> derivative = {});
  /// Throws kInvalidParams when `theta` is empty or holds non-finite values.
  static SignalSpec coefficients(std::string name, std::vector<double> theta);

  const std::string& name() const noexcept { return name_; }
  bool is_coefficient_form() const noexcept;
  bool has_derivative() const noexcept;

  const AnalyticForm* as_analytic() const noexcept;
  const CoefficientForm* as_coefficients() const noexcept;

  /// Overrides the computed |S'|_1.
  SignalSpec& with_sdot_l1(double value);
  std::optional<double> supplied_sdot_l1() const noexcept { return sdot_l1_; }

 private:
  SignalSpec(std::string name, std::variant<AnalyticForm, CoefficientForm> form)
      : name_(std::move(name)), form_(std::move(form)) {}

  std::string name_;
  std::variant<AnalyticForm, CoefficientForm> form_;
  std::optional<double> sdot_l1_;
};

/// S({t}).
double eval(const SignalSpec& s, double t);

/// S'({t}); throws kCapability if unavailable.
double eval_derivative(const SignalSpec& s, double t);

/// theta_j = int_0^1 S phi_j, j = 1..j_max. Coefficient form is passed through
/// (zero padded or truncated).
std::vector<double> fourier_coefficients(const SignalSpec& s, std::size_t j_max,
                                         std::size_t quad_points = kDefaultQuadPoints);

/// int_0^1 |S'(t)| dt by midpoint quadrature, or the supplied value.
double sdot_l1(const SignalSpec& s, std::size_t quad_points = kDefaultQuadPoints);

/// ||S||^2 by midpoint quadrature (exact sum of squares for coefficient form).
double norm_sq(const SignalSpec& s, std::size_t quad_points = kDefaultQuadPoints);

/// Built-in test signals: "zero", "single-mode", "two-mode", "sine",
/// "parabola", "sine-plus-parabola", "poly-decay".
std::vector<std::string> catalogue_names();
std::optional<SignalSpec> catalogue(std::string_view name);

/// Number of coefficients stored for the "poly-decay" signal.
inline constexpr std::size_t kPolyDecayTerms = 512;

/// Coefficient file: one `j value` pair per line, 1-based j; blank lines and
/// `#` comments allowed. Missing indices are zero.
SignalSpec read_coefficient_file(std::istream& in, std::string name);
SignalSpec load_coefficient_file(const std::string& path);

}  // namespace perisem
