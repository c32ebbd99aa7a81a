#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "wcreg/adversary.hpp"
#include "wcreg/grid.hpp"
#include "wcreg/linear_map.hpp"

namespace wcreg {

struct LatticeCompactum;

enum class PhiKind { SupNorm, HolderNorm };

/// K_c = { v : phi(v) <= c } with phi the sup-norm or a discrete Holder norm.
struct CompactumSpec {
  PhiKind kind;
  double a;  // Holder exponent; ignored for SupNorm
  double c;

  static CompactumSpec sup_norm(double c);
  static CompactumSpec holder(double a, double c);

  double phi(const GridFunction& v) const;
  /// A subgradient of phi at v.
  GridFunction phi_subgradient(const GridFunction& v) const;
  /// Upper bound on the Euclidean norm of any phi subgradient on an n-node grid.
  double phi_lipschitz(std::size_t n) const;
};

/// The forward operator and whether it is injective on the grid.
struct ProblemSpec {
  LinearMap op;
  bool injective;

  /// Trapezoid integration. Its matrix kills (1, -1, 1, ...), so the flag is false.
  static ProblemSpec integration();
  /// Explicit matrix; the injective flag comes from a rank test.
  static ProblemSpec matrix(Eigen::MatrixXd m);
};

struct VariationalResult {
  GridFunction v_delta;
  double objective_value;
  double misfit;
  double phi_value;
  double certificate_bound;
};

/// F_delta(v) = sup_norm(A v - g_delta) + delta * phi(v).
double objective(const GridFunction& v, const NoisyData& data, const CompactumSpec& spec,
                 const ProblemSpec& prob);

/// The feasible set { misfit <= delta, phi <= c } as an adversary class.
FeasibleClass as_feasible_class(const NoisyData& data, const CompactumSpec& spec,
                                const ProblemSpec& prob, std::optional<GridFunction> anchor = std::nullopt);

/// Projected subgradient descent on F_delta over the feasible set.
///
/// Starts from a feasible anchor: zero, the least-squares data fit pulled into
/// K_c, a Tikhonov-damped fit, or the result of a slab-projection feasibility
/// search, in that order. Iterates are projected onto K_c and pulled back
/// toward the anchor whenever the misfit exceeds delta, so every iterate is
/// feasible. The seed breaks ties among equal residual peaks. The best
/// iterate is returned.
/// With `phi_truth` (phi of a known synthetic solution) the certificate is
/// 2 (1 + phi_truth) delta, otherwise the best objective found.
/// Throws InfeasibleError when no feasible point is found within budget.
VariationalResult minimize(const NoisyData& data, const CompactumSpec& spec, const ProblemSpec& prob,
                           std::size_t budget, std::uint64_t seed,
                           std::optional<double> phi_truth = std::nullopt);

/// minimize with both feasibility constraints re-verified on the output.
VariationalResult regularize_variational(const NoisyData& data, const CompactumSpec& spec,
                                         const ProblemSpec& prob, std::size_t budget, std::uint64_t seed,
                                         std::optional<double> phi_truth = std::nullopt);

struct ConvergenceRow {
  double delta;
  double misfit;
  double phi;
  double objective;
  double sup_err_truth;
  double sup_err_ensemble;
  double omega_2delta;
};

struct ConvergenceOptions {
  std::optional<NoiseModel> noise;  // nullopt: exact data
  std::size_t budget = 20000;
  std::size_t ensemble_size = 50;
  std::uint64_t seed = 0;
};

/// One row per delta (in the given order): regularize_variational on data
/// built from u_true, the ensemble sup-error estimate around v_delta, and
/// the exact omega(2 delta) on `lattice` (default: constants lattice with 21
/// levels over [-c, c]). Requires phi(u_true) <= c.
std::vector<ConvergenceRow> convergence_study(const GridFunction& u_true, std::span<const double> deltas,
                                              const CompactumSpec& spec, const ProblemSpec& prob,
                                              const ConvergenceOptions& options,
                                              const LatticeCompactum* lattice = nullptr);

/// CSV with header delta,misfit,phi,objective,sup_err_truth,sup_err_ensemble,omega_2delta.
void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows);
std::vector<ConvergenceRow> read_convergence_csv(std::istream& in);

}  // namespace wcreg
