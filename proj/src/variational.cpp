#include "wcreg/variational.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "wcreg/csv.hpp"
#include "wcreg/error.hpp"
#include "wcreg/modulus.hpp"
#include "wcreg/rng.hpp"

namespace wcreg {

CompactumSpec CompactumSpec::sup_norm(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw PreconditionError("compactum bound c must be > 0");
  return CompactumSpec{PhiKind::SupNorm, 0.0, c};
}

CompactumSpec CompactumSpec::holder(double a, double c) {
  HolderParams check(a, c);
  return CompactumSpec{PhiKind::HolderNorm, check.a, check.M};
}

double CompactumSpec::phi(const GridFunction& v) const {
  return kind == PhiKind::SupNorm ? wcreg::sup_norm(v) : discrete_holder_norm(v, a);
}

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// e_j - e_i scaled by w, added into g.
void add_difference(std::vector<double>& g, std::size_t i, std::size_t j, double w) {
  g[j] += w;
  g[i] -= w;
}

}  // namespace

GridFunction CompactumSpec::phi_subgradient(const GridFunction& v) const {
  std::vector<double> g(v.size(), 0.0);
  if (kind == PhiKind::SupNorm) {
    const auto k = sup_argmax(v);
    g[k] = sign(v[k]);
    return GridFunction(std::move(g));
  }
  const auto parts = holder_norm_parts(v, a);
  const double dx = v.spacing();
  g[parts.sup_index] += sign(v[parts.sup_index]);
  if (a <= 1.0) {
    if (parts.quotient > 0.0) {
      const auto i = parts.quotient_i;
      const auto j = parts.quotient_j;
      const double w = sign(v[j] - v[i]) / std::pow(static_cast<double>(j - i) * dx, a);
      add_difference(g, i, j, w);
    }
    return GridFunction(std::move(g));
  }
  auto slope = [&](std::size_t i) { return (v[i + 1] - v[i]) / dx; };
  if (parts.slope_sup > 0.0) {
    const auto i = parts.slope_index;
    add_difference(g, i, i + 1, sign(slope(i)) / dx);
  }
  if (parts.quotient > 0.0) {
    const auto i = parts.quotient_i;
    const auto j = parts.quotient_j;
    const double w = sign(slope(j) - slope(i)) / std::pow(static_cast<double>(j - i) * dx, a - 1.0) / dx;
    add_difference(g, j, j + 1, w);
    add_difference(g, i, i + 1, -w);
  }
  return GridFunction(std::move(g));
}

double CompactumSpec::phi_lipschitz(std::size_t n) const {
  if (kind == PhiKind::SupNorm) return 1.0;
  const double dx = 1.0 / static_cast<double>(n - 1);
  if (a <= 1.0) return 1.0 + std::sqrt(2.0) / std::pow(dx, a);
  return 1.0 + std::sqrt(2.0) / dx + 2.0 * std::sqrt(2.0) / std::pow(dx, a);
}

ProblemSpec ProblemSpec::integration() { return ProblemSpec{LinearMap::integration(), false}; }

ProblemSpec ProblemSpec::matrix(Eigen::MatrixXd m) {
  auto op = LinearMap::matrix(std::move(m));
  const auto n = static_cast<std::size_t>(op.explicit_matrix()->rows());
  const bool inj = op.injective_on(n);
  return ProblemSpec{std::move(op), inj};
}

double objective(const GridFunction& v, const NoisyData& data, const CompactumSpec& spec,
                 const ProblemSpec& prob) {
  require_same_grid(v, data.g_delta, "objective");
  return sup_norm(prob.op.apply(v) - data.g_delta) + data.delta * spec.phi(v);
}

FeasibleClass as_feasible_class(const NoisyData& data, const CompactumSpec& spec, const ProblemSpec& prob,
                                std::optional<GridFunction> anchor) {
  auto cls = spec.kind == PhiKind::SupNorm
                 ? FeasibleClass::sup_only(spec.c, data, std::move(anchor))
                 : FeasibleClass::holder(HolderParams(spec.a, spec.c), data, std::move(anchor));
  cls.op = prob.op;
  return cls;
}

namespace {

constexpr std::size_t kDenseLimit = 1500;

class Solver {
 public:
  Solver(const NoisyData& data, const CompactumSpec& spec, const ProblemSpec& prob, std::uint64_t seed)
      : data_(data), spec_(spec), prob_(prob), rng_(seed) {}

  double misfit(const GridFunction& v) const { return sup_norm(prob_.op.apply(v) - data_.g_delta); }

  bool feasible(const GridFunction& v) const {
    return misfit(v) <= data_.delta && spec_.phi(v) <= spec_.c;
  }

  GridFunction project(const GridFunction& v) const {
    if (spec_.kind == PhiKind::SupNorm) {
      std::vector<double> out(v.values().begin(), v.values().end());
      for (double& x : out) x = std::clamp(x, -spec_.c, spec_.c);
      return GridFunction(std::move(out));
    }
    const double p = spec_.phi(v);
    return p <= spec_.c ? v : (spec_.c / p) * v;
  }

  // Largest theta in [0, 1] keeping anchor + theta (y - anchor) within the misfit bound.
  double segment_limit(const GridFunction& anchor, const GridFunction& y) const {
    const auto r = prob_.op.apply(anchor) - data_.g_delta;
    const auto q = prob_.op.apply(y - anchor);
    double theta = 1.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      if (q[k] > 0.0) theta = std::min(theta, (data_.delta - r[k]) / q[k]);
      if (q[k] < 0.0) theta = std::min(theta, (-data_.delta - r[k]) / q[k]);
    }
    return std::max(theta, 0.0);
  }

  std::optional<GridFunction> find_anchor(std::size_t budget) {
    const std::size_t n = data_.g_delta.size();
    std::vector<GridFunction> candidates{GridFunction::zeros(n)};
    Eigen::MatrixXd a;
    if (n <= kDenseLimit) {
      a = prob_.op.dense(n);
      const Eigen::Map<const Eigen::VectorXd> g(data_.g_delta.values().data(), static_cast<Eigen::Index>(n));
      const Eigen::VectorXd x = a.completeOrthogonalDecomposition().solve(g);
      if (x.allFinite()) candidates.push_back(project(to_grid(x)));
    }
    if (auto best = best_feasible(candidates)) return best;

    if (n <= kDenseLimit) {
      // Tikhonov ladder from one SVD: noisy data make the plain fit oscillate.
      const Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::Map<const Eigen::VectorXd> g(data_.g_delta.values().data(), static_cast<Eigen::Index>(n));
      const Eigen::VectorXd ug = svd.matrixU().transpose() * g;
      const Eigen::VectorXd& sv = svd.singularValues();
      const double top = sv.size() > 0 ? sv(0) * sv(0) : 0.0;
      for (int k = 1; k <= 16 && top > 0.0; ++k) {
        const double alpha = top * std::pow(10.0, -k);
        const Eigen::VectorXd coef = (sv.array() / (sv.array().square() + alpha) * ug.array()).matrix();
        const Eigen::VectorXd x = svd.matrixV() * coef;
        if (x.allFinite()) candidates.push_back(project(to_grid(x)));
      }
      if (auto best = best_feasible(candidates)) return best;
    }

    GridFunction start = *std::min_element(candidates.begin(), candidates.end(), [&](const auto& l, const auto& r) {
      return misfit(l) < misfit(r);
    });
    if (n <= kDenseLimit) {
      // Cyclic projections onto slightly shrunk slabs |a_k . v - g_k| <= delta, then onto K_c.
      std::vector<double> v(start.values().begin(), start.values().end());
      const double half = data_.delta * (1.0 - std::ldexp(1.0, -10));
      const std::size_t sweeps = std::min<std::size_t>(budget, 1000);
      for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (Eigen::Index k = 0; k < a.rows(); ++k) {
          const double rr = a.row(k).squaredNorm();
          if (rr == 0.0) continue;
          double r = -data_.g_delta[static_cast<std::size_t>(k)];
          for (Eigen::Index j = 0; j < a.cols(); ++j) r += a(k, j) * v[static_cast<std::size_t>(j)];
          const double excess = r - std::clamp(r, -half, half);
          if (excess == 0.0) continue;
          for (Eigen::Index j = 0; j < a.cols(); ++j) v[static_cast<std::size_t>(j)] -= excess / rr * a(k, j);
        }
        const auto x = project(GridFunction(v));
        if (feasible(x)) return x;
        v.assign(x.values().begin(), x.values().end());
      }
      start = GridFunction(std::move(v));
    }

    // Projected subgradient on the misfit alone with Polyak steps aimed at delta / 2.
    GridFunction x = std::move(start);
    const double target = 0.5 * data_.delta;
    for (std::size_t t = 0; t < budget; ++t) {
      if (feasible(x)) return x;
      const auto r = prob_.op.apply(x) - data_.g_delta;
      const auto k = pick_argmax(r);
      std::vector<double> e(n, 0.0);
      e[k] = sign(r[k]);
      const auto grad = prob_.op.apply_transpose(GridFunction(std::move(e)));
      double gg = 0.0;
      for (double v : grad.values()) gg += v * v;
      if (gg == 0.0) break;
      x = project(x - ((std::abs(r[k]) - target) / gg) * grad);
    }
    if (feasible(x)) return x;
    return std::nullopt;
  }

  std::optional<GridFunction> best_feasible(const std::vector<GridFunction>& candidates) const {
    std::optional<GridFunction> best;
    double best_f = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
      if (!feasible(c)) continue;
      const double f = objective(c, data_, spec_, prob_);
      if (f < best_f) {
        best_f = f;
        best = c;
      }
    }
    return best;
  }

  static GridFunction to_grid(const Eigen::VectorXd& x) {
    return GridFunction(std::vector<double>(x.data(), x.data() + x.size()));
  }

  double operator_row_norm(std::size_t n) const {
    if (prob_.op.is_integration()) {
      const double dx = 1.0 / static_cast<double>(n - 1);
      return dx * std::sqrt(static_cast<double>(n - 2) + 0.5);
    }
    return prob_.op.explicit_matrix()->rowwise().norm().maxCoeff();
  }

  GridFunction subgradient(const GridFunction& v) {
    const auto r = prob_.op.apply(v) - data_.g_delta;
    const auto k = pick_argmax(r);
    std::vector<double> e(v.size(), 0.0);
    e[k] = sign(r[k]);
    auto grad = prob_.op.apply_transpose(GridFunction(std::move(e)));
    if (spec_.kind == PhiKind::SupNorm) {
      const auto j = pick_argmax(v);
      std::vector<double> s(v.size(), 0.0);
      s[j] = sign(v[j]);
      grad += data_.delta * GridFunction(std::move(s));
    } else {
      grad += data_.delta * spec_.phi_subgradient(v);
    }
    return grad;
  }

 private:
  // Argmax of |f| with seeded uniform tie-breaking.
  std::size_t pick_argmax(const GridFunction& f) {
    const double m = sup_norm(f);
    std::vector<std::size_t> ties;
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (std::abs(f[k]) == m) ties.push_back(k);
    }
    if (ties.size() == 1) return ties.front();
    return ties[static_cast<std::size_t>(rng_.uniform_int(0, static_cast<std::int64_t>(ties.size()) - 1))];
  }

  const NoisyData& data_;
  const CompactumSpec& spec_;
  const ProblemSpec& prob_;
  Rng rng_;
};

double euclidean_norm(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s);
}

}  // namespace

VariationalResult minimize(const NoisyData& data, const CompactumSpec& spec, const ProblemSpec& prob,
                           std::size_t budget, std::uint64_t seed, std::optional<double> phi_truth) {
  const std::size_t n = data.g_delta.size();
  if (prob.op.explicit_matrix()) prob.op.dense(n);  // size check
  Solver solver(data, spec, prob, seed);

  const auto anchor = solver.find_anchor(budget);
  if (!anchor) throw InfeasibleError("infeasible problem: no feasible point located within budget");

  GridFunction best = *anchor;
  double best_f = objective(best, data, spec, prob);
  GridFunction x = best;

  const double lipschitz = solver.operator_row_norm(n) + data.delta * spec.phi_lipschitz(n);
  const double step0 = spec.c / (10.0 * lipschitz);
  for (std::size_t t = 0; t < budget; ++t) {
    const auto grad = solver.subgradient(x);
    if (euclidean_norm(grad) == 0.0) break;
    auto y = solver.project(x - (step0 / std::sqrt(static_cast<double>(t + 1))) * grad);
    if (solver.misfit(y) > data.delta) {
      const double theta = solver.segment_limit(*anchor, y);
      y = *anchor + theta * (y - *anchor);
    }
    if (!solver.feasible(y)) continue;
    x = std::move(y);
    const double f = objective(x, data, spec, prob);
    if (f < best_f) {
      best_f = f;
      best = x;
    }
  }

  const double mis = solver.misfit(best);
  const double phi = spec.phi(best);
  const double cert = phi_truth ? 2.0 * (1.0 + *phi_truth) * data.delta : best_f;
  return VariationalResult{std::move(best), mis + data.delta * phi, mis, phi, cert};
}

VariationalResult regularize_variational(const NoisyData& data, const CompactumSpec& spec,
                                         const ProblemSpec& prob, std::size_t budget, std::uint64_t seed,
                                         std::optional<double> phi_truth) {
  auto result = minimize(data, spec, prob, budget, seed, phi_truth);
  const double mis = sup_norm(prob.op.apply(result.v_delta) - data.g_delta);
  const double phi = spec.phi(result.v_delta);
  if (!(mis <= data.delta) || !(phi <= spec.c)) {
    throw InfeasibleError("variational output violates the feasible set (misfit " + format_double(mis) +
                          ", phi " + format_double(phi) + ")");
  }
  return result;
}

std::vector<ConvergenceRow> convergence_study(const GridFunction& u_true, std::span<const double> deltas,
                                              const CompactumSpec& spec, const ProblemSpec& prob,
                                              const ConvergenceOptions& options,
                                              const LatticeCompactum* lattice) {
  const double phi_truth = spec.phi(u_true);
  if (!(phi_truth <= spec.c)) {
    throw PreconditionError("convergence_study requires phi(u_true) <= c (phi(u_true) = " +
                            format_double(phi_truth) + ")");
  }
  const std::size_t n = u_true.size();
  const bool lattice_uses_integration = prob.op.is_integration();
  const auto default_lattice = LatticeCompactum::constants(
      uniform_levels(-spec.c, spec.c, 21), spec, lattice_uses_integration ? 3 : n);
  const LatticeCompactum& lat = lattice ? *lattice : default_lattice;
  const ProblemSpec lattice_prob = lattice_uses_integration ? ProblemSpec::integration() : prob;

  const GridFunction g = prob.op.apply(u_true);
  std::vector<ConvergenceRow> rows;
  rows.reserve(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double delta = deltas[i];
    const NoisyData data = options.noise ? add_noise(g, delta, *options.noise, splitmix64(options.seed + i))
                                         : NoisyData(g, delta);
    const auto result = regularize_variational(data, spec, prob, options.budget, options.seed, phi_truth);

    const auto cls = as_feasible_class(data, spec, prob, result.v_delta);
    auto ensemble = sample_feasible(cls, options.ensemble_size, options.seed);
    if (is_feasible(u_true, cls).feasible) ensemble.push_back(u_true);
    ensemble.push_back(result.v_delta);
    const double ens = sup_error_estimate(result.v_delta, cls, ensemble).lower_bound;

    rows.push_back(ConvergenceRow{delta, result.misfit, result.phi_value, result.objective_value,
                                  sup_norm(result.v_delta - u_true), ens,
                                  modulus_bruteforce(lat, 2.0 * delta, lattice_prob)});
  }
  return rows;
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows) {
  out << "delta,misfit,phi,objective,sup_err_truth,sup_err_ensemble,omega_2delta\n";
  for (const auto& r : rows) {
    const double vals[] = {r.delta, r.misfit, r.phi, r.objective, r.sup_err_truth, r.sup_err_ensemble,
                           r.omega_2delta};
    write_numeric_row(out, vals);
  }
}

std::vector<ConvergenceRow> read_convergence_csv(std::istream& in) {
  const auto table =
      read_numeric_csv(in, "delta,misfit,phi,objective,sup_err_truth,sup_err_ensemble,omega_2delta");
  std::vector<ConvergenceRow> rows;
  for (const auto& r : table.rows) rows.push_back({r[0], r[1], r[2], r[3], r[4], r[5], r[6]});
  return rows;
}

}  // namespace wcreg
