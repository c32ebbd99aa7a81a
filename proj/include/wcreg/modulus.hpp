#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "wcreg/grid.hpp"
#include "wcreg/variational.hpp"

namespace wcreg {

enum class LatticeKind {
  Full,       // every tuple of levels over the nodes
  Constants,  // constant functions, one per level
};

/// A finite compactum: grid functions on `nodes` nodes with values drawn from
/// `levels`, keeping only members with spec.phi <= spec.c.
struct LatticeCompactum {
  std::size_t nodes;
  std::vector<double> levels;
  CompactumSpec spec;
  LatticeKind kind = LatticeKind::Full;

  static LatticeCompactum full(std::size_t nodes, std::vector<double> levels, CompactumSpec spec);
  static LatticeCompactum constants(std::vector<double> levels, CompactumSpec spec, std::size_t nodes = 3);

  /// Members before filtering: |levels|^nodes (Full) or |levels| (Constants).
  double raw_count() const;
  std::vector<GridFunction> members() const;
};

/// (lo (m - k) + hi k) / m for k = 0..m, m = count - 1.
std::vector<double> uniform_levels(double lo, double hi, std::size_t count);

/// Largest member-pair count modulus_bruteforce accepts.
inline constexpr double kMaxModulusPairs = 1e7;

/// Exact omega(delta) = max sup_norm(v - w) over lattice pairs with
/// sup_norm(A v - A w) <= delta. Throws PreconditionError above kMaxModulusPairs.
double modulus_bruteforce(const LatticeCompactum& lattice, double delta, const ProblemSpec& prob);

/// Lower bound on the lattice omega(delta) from `budget` random member pairs.
double modulus_search(const LatticeCompactum& lattice, double delta, const ProblemSpec& prob,
                      std::size_t budget, std::uint64_t seed);

/// Lower bound on omega(delta) over the continuum K_c on an n-node grid, from
/// structured pairs (sine, bump) and `budget` random base/direction pairs.
double modulus_search(const CompactumSpec& spec, std::size_t n, double delta, const ProblemSpec& prob,
                      std::size_t budget, std::uint64_t seed);

struct ModulusRow {
  double delta;
  double omega;
};

/// `delta,omega` CSV.
void write_modulus_csv(std::ostream& out, std::span<const ModulusRow> rows);
std::vector<ModulusRow> read_modulus_csv(std::istream& in);

}  // namespace wcreg
