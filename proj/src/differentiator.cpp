#include "wcreg/differentiator.hpp"

#include <algorithm>
#include <cmath>

#include "wcreg/error.hpp"

namespace wcreg {

namespace {

void require_smooth_regime(const HolderParams& params) {
  if (!(params.a > 1.0)) {
    throw PreconditionError("the differentiator requires a > 1 (no step rule exists for a <= 1)");
  }
}

void require_positive_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw PreconditionError("delta must be > 0");
}

// Number of grid spacings in h; throws when h is off the lattice.
std::size_t lattice_steps(double h, std::size_t n) {
  const double dx = 1.0 / static_cast<double>(n - 1);
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("step h must be > 0");
  const double ratio = h / dx;
  const double m = std::round(ratio);
  if (m < 1.0 || std::abs(ratio - m) > 1e-9 * std::max(1.0, m)) {
    throw PreconditionError("step h must be a positive integer multiple of the grid spacing");
  }
  const auto steps = static_cast<std::size_t>(m);
  if (2 * steps > n - 1) throw PreconditionError("step h must not exceed 1/2");
  return steps;
}

}  // namespace

double optimal_step(double delta, const HolderParams& params) {
  require_smooth_regime(params);
  require_positive_delta(delta);
  return std::pow(delta / ((params.a - 1.0) * params.M), 1.0 / params.a);
}

double step_size(double delta, const HolderParams& params, double grid_spacing) {
  const double h = optimal_step(delta, params);
  if (!(grid_spacing > 0.0) || grid_spacing > 0.25) {
    throw PreconditionError("grid too coarse: spacing must lie in (0, 1/4]");
  }
  return std::clamp(h, grid_spacing, 0.25);
}

GridFunction differentiate(const NoisyData& data, double h) {
  const auto& g = data.g_delta;
  const std::size_t n = g.size();
  const std::size_t m = lattice_steps(h, n);
  const double step = static_cast<double>(m) / static_cast<double>(n - 1);

  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k < m) {
      out[k] = (g[k + m] - g[k]) / step;
    } else if (k + m > n - 1) {
      out[k] = (g[k] - g[k - m]) / step;
    } else {
      out[k] = (g[k + m] - g[k - m]) / (2.0 * step);
    }
  }
  return GridFunction(std::move(out));
}

double error_bound(double delta, const HolderParams& params, double h) {
  require_smooth_regime(params);
  require_positive_delta(delta);
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("step h must be > 0");
  return delta / h + params.M * std::pow(h, params.a - 1.0);
}

RegularizerOutput regularize(const NoisyData& data, const HolderParams& params) {
  require_smooth_regime(params);
  const std::size_t n = data.g_delta.size();
  const double dx = data.g_delta.spacing();
  if (dx > 0.25) throw PreconditionError("grid too coarse: spacing exceeds 1/4");

  const double h_raw = step_size(data.delta, params, dx);
  auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(h_raw / dx)));
  if (static_cast<double>(steps) * dx > 0.25) {
    steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.25 / dx)));
  }
  const double h = static_cast<double>(steps) / static_cast<double>(n - 1);

  return RegularizerOutput{differentiate(data, h), h, error_bound(data.delta, params, h)};
}

}  // namespace wcreg
