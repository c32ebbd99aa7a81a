#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace wcreg {

/// Real values sampled on the uniform grid x_k = k / (n - 1) over [0, 1].
///
/// Values are piecewise-linearly interpolated between nodes wherever a
/// continuous interpretation is needed (integration, Holder quotients).
class GridFunction {
 public:
  /// Throws PreconditionError when values.size() < 2 or a value is not finite.
  explicit GridFunction(std::vector<double> values);

  static GridFunction zeros(std::size_t n);
  static GridFunction constant(std::size_t n, double c);
  static GridFunction sample(std::size_t n, const std::function<double(double)>& f);

  std::size_t size() const noexcept { return values_.size(); }
  double spacing() const noexcept { return 1.0 / static_cast<double>(values_.size() - 1); }
  double x(std::size_t k) const noexcept {
    return static_cast<double>(k) / static_cast<double>(values_.size() - 1);
  }

  double operator[](std::size_t k) const noexcept { return values_[k]; }
  std::span<const double> values() const noexcept { return values_; }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double s);

  friend GridFunction operator+(GridFunction lhs, const GridFunction& rhs) { return lhs += rhs; }
  friend GridFunction operator-(GridFunction lhs, const GridFunction& rhs) { return lhs -= rhs; }
  friend GridFunction operator*(double s, GridFunction f) { return f *= s; }
  friend GridFunction operator*(GridFunction f, double s) { return f *= s; }

  bool operator==(const GridFunction&) const = default;

 private:
  std::vector<double> values_;
};

/// Throws GridMismatchError unless both functions live on the same grid.
void require_same_grid(const GridFunction& f, const GridFunction& g, const char* what);

/// Smoothness exponent a in (0, 2] and norm budget M > 0.
struct HolderParams {
  double a;
  double M;

  HolderParams(double exponent, double budget);
};

/// Observed data g_delta together with its noise level delta > 0.
struct NoisyData {
  GridFunction g_delta;
  double delta;

  NoisyData(GridFunction g, double noise_level);
};

double sup_norm(const GridFunction& f);

/// Index where |f| attains its maximum (first one on ties).
std::size_t sup_argmax(const GridFunction& f);

/// The individual terms of the discrete Holder norm and where they are attained.
///
/// For a <= 1 only `sup` and `quotient` are used and the quotient runs over
/// node values. For a > 1 the quotient runs over forward slopes
/// s_i = (f_{i+1} - f_i) / dx located at x_i.
struct HolderNormParts {
  double sup = 0.0;
  std::size_t sup_index = 0;
  double slope_sup = 0.0;
  std::size_t slope_index = 0;
  double quotient = 0.0;
  std::size_t quotient_i = 0;
  std::size_t quotient_j = 0;

  double total() const noexcept { return sup + slope_sup + quotient; }
};

HolderNormParts holder_norm_parts(const GridFunction& f, double a);

/// Discrete ||f||_a. Requires f.size() >= 3 and 0 < a <= 2.
double discrete_holder_norm(const GridFunction& f, double a);

/// Cumulative trapezoid integral from 0 to each node; exact on the
/// piecewise-linear interpretation of v.
GridFunction integrate(const GridFunction& v);

/// Transpose of the trapezoid integration matrix applied to r.
GridFunction integrate_transpose(const GridFunction& r);

enum class NoiseModel { UniformIid, AlternatingWorstCase };

/// Perturbs g by at most delta at every node.
///
/// UniformIid draws each perturbation from [-delta, delta) using Rng(seed);
/// AlternatingWorstCase uses (-1)^k delta. Max |g_delta - g| <= delta holds
/// exactly in floating point.
NoisyData add_noise(const GridFunction& g, double delta, NoiseModel model, std::uint64_t seed);

/// `x,value` CSV with 17 significant digits.
void write_csv(std::ostream& out, const GridFunction& f);
std::string to_csv(const GridFunction& f);

/// Parses `x,value` CSV. Throws PreconditionError on malformed input or when
/// the x column is not the uniform grid over [0, 1].
GridFunction read_csv(std::istream& in);

/// printf("%.17g").
std::string format_double(double v);

}  // namespace wcreg
