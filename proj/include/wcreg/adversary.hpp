#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wcreg/grid.hpp"
#include "wcreg/linear_map.hpp"

namespace wcreg {

enum class ClassKind { Holder, SupOnly };

/// The feasible set S_delta = { v : ||A v - g_delta|| <= delta, class_norm(v) <= M }.
///
/// The class norm is the discrete Holder a-norm (Holder kind) or the plain
/// sup-norm (SupOnly kind). `anchor` is an optional known member (typically
/// the synthetic truth) used to seed samplers.
struct FeasibleClass {
  ClassKind kind;
  double a;  // ignored for SupOnly
  double M;
  NoisyData data;
  LinearMap op = LinearMap::integration();
  std::optional<GridFunction> anchor;

  static FeasibleClass holder(const HolderParams& params, NoisyData data,
                              std::optional<GridFunction> anchor = std::nullopt);
  static FeasibleClass sup_only(double M, NoisyData data,
                                std::optional<GridFunction> anchor = std::nullopt);

  double class_norm(const GridFunction& v) const;
  double delta() const noexcept { return data.delta; }
  std::size_t grid_size() const noexcept { return data.g_delta.size(); }
};

/// Residuals of the two membership constraints.
struct Membership {
  double misfit;
  double norm;
  bool feasible;
};

Membership is_feasible(const GridFunction& v, const FeasibleClass& cls);

/// Up to `count` certified members of S_delta, obtained by moving from the
/// anchor (or zero when no anchor is set) along random sinusoids and triangle
/// bumps. Member i depends only on (seed, i). Throws InfeasibleError when the
/// seed element is not feasible.
std::vector<GridFunction> sample_feasible(const FeasibleClass& cls, std::size_t count,
                                          std::uint64_t seed);

/// Ensemble maximum of sup_norm(reconstruction - v). A lower bound on the
/// supremum over the whole feasible set.
struct SupErrorEstimate {
  double lower_bound;
  std::size_t ensemble_size;
};

/// Throws PreconditionError on an empty ensemble or an ensemble member that
/// fails the membership test.
SupErrorEstimate sup_error_estimate(const GridFunction& reconstruction, const FeasibleClass& cls,
                                    std::span<const GridFunction> ensemble);

/// Two certified members of one feasible class and their sup-norm distance.
struct AdversarialPair {
  ClassKind kind;
  double M;
  double delta;
  GridFunction v1;
  GridFunction v2;
  double separation;
  Membership certificate1;
  Membership certificate2;
};

/// Frequency used by sine_pair: ceil(M / (pi delta)).
std::size_t sine_frequency(double M, double delta);

/// v1 = 0, v2 = M sin(2 pi k x) on an n-node grid; certified for the
/// sup-only(M) class with g_delta = 0. Requires n >= 20 k.
AdversarialPair sine_pair(double M, double delta, std::size_t n);

/// v1 = 0, v2 = triangle bump at 1/2 with slopes +-M/2 and height
/// min(sqrt(delta M / 2), M / 2); certified for holder(1, M) with g_delta = 0.
AdversarialPair bump_pair(double M, double delta, std::size_t n);

enum class Generator { Sine, Bump, RandomSearch };

/// Largest certified separation among feasible pairs produced by the chosen
/// generators. Sine and Bump are single structured constructions that do not
/// consume budget; RandomSearch tries `budget` random directions. Monotone
/// nondecreasing in budget for a fixed seed.
double diameter_probe(const FeasibleClass& cls, std::span<const Generator> generators,
                      std::size_t budget, std::uint64_t seed = 0);

/// Largest t >= 0 with base + t * direction in the class (0 when base itself
/// is infeasible or direction is zero).
double feasible_extent(const FeasibleClass& cls, const GridFunction& base,
                       const GridFunction& direction);

/// Pair CSV: `#`-prefixed key=value certificate lines, then `x1,v1,x2,v2` rows.
void write_pair_csv(std::ostream& out, const AdversarialPair& pair);
AdversarialPair read_pair_csv(std::istream& in);

std::string to_string(ClassKind kind);

}  // namespace wcreg
