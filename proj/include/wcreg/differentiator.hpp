#pragma once

#include "wcreg/grid.hpp"

namespace wcreg {

/// Result of the noisy-data differentiator: reconstruction u_delta, the
/// lattice step actually used and the certified worst-case bound eta.
struct RegularizerOutput {
  GridFunction u_delta;
  double h_used;
  double eta;
};

/// Step minimizing delta/h + M h^(a-1) over h > 0, i.e.
/// (delta / ((a - 1) M))^(1/a). Requires a > 1 and delta > 0.
double optimal_step(double delta, const HolderParams& params);

/// optimal_step clamped to [grid_spacing, 1/4].
double step_size(double delta, const HolderParams& params, double grid_spacing);

/// Central difference with step h at nodes h <= x <= 1 - h, one-sided
/// differences within h of either endpoint. h must be a multiple of the grid
/// spacing with dx <= h <= 1/2.
GridFunction differentiate(const NoisyData& data, double h);

/// Certified sup-error bound delta/h + M h^(a-1) over the feasible class.
double error_bound(double delta, const HolderParams& params, double h);

/// step_size snapped to the grid lattice, then differentiate and error_bound
/// with the snapped step. Throws PreconditionError when a <= 1 or the grid
/// spacing exceeds 1/4.
RegularizerOutput regularize(const NoisyData& data, const HolderParams& params);

}  // namespace wcreg
