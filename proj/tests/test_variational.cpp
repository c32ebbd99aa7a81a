#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "oracles.hpp"
#include "wcreg/error.hpp"
#include "wcreg/modulus.hpp"
#include "wcreg/variational.hpp"

using namespace wcreg;

namespace {

double oracle_objective(const GridFunction& v, const GridFunction& g, double delta, double phi) {
  const auto av = oracle::trapezoid(v);
  double mis = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) mis = std::max(mis, std::abs(av[k] - g[k]));
  return mis + delta * phi;
}

// Exhaustive search over {-2.0, -1.9, ..., 2.0}^3 of the feasible objective minimum.
double lattice_optimum_3(const GridFunction& g, double delta, double c) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j)
      for (int k = -20; k <= 20; ++k) {
        const GridFunction v({i / 10.0, j / 10.0, k / 10.0});
        double sup = 0.0;
        for (double x : v.values()) sup = std::max(sup, std::abs(x));
        if (sup > c) continue;
        const auto av = oracle::trapezoid(v);
        double mis = 0.0;
        for (std::size_t m = 0; m < 3; ++m) mis = std::max(mis, std::abs(av[m] - g[m]));
        if (mis > delta) continue;
        best = std::min(best, mis + delta * sup);
      }
  return best;
}

}  // namespace

TEST_CASE("objective examples") {
  const auto spec = CompactumSpec::sup_norm(2.0);
  const auto prob = ProblemSpec::integration();
  CHECK(objective(GridFunction::zeros(11), NoisyData(GridFunction::zeros(11), 0.1), spec, prob) == 0.0);

  const auto u = GridFunction::constant(11, 1.0);
  CHECK(objective(u, NoisyData(integrate(u), 0.1), spec, prob) == doctest::Approx(0.1));

  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = oracle::random_function(rng, 5);
    const auto g = oracle::random_function(rng, 5);
    const double delta = rng.uniform(0.01, 1.0);
    const auto hspec = CompactumSpec::holder(1.5, 10.0);
    CHECK(objective(v, NoisyData(g, delta), hspec, prob) ==
          doctest::Approx(oracle_objective(v, g, delta, oracle::holder_norm(v, 1.5))).epsilon(1e-12));
    CHECK(objective(v, NoisyData(g, delta), spec, prob) ==
          doctest::Approx(oracle_objective(v, g, delta, sup_norm(v))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(objective(GridFunction::zeros(4), NoisyData(GridFunction::zeros(5), 0.1), spec, prob),
                  GridMismatchError);
}

TEST_CASE("CompactumSpec") {
  CHECK_THROWS_AS(CompactumSpec::sup_norm(0.0), PreconditionError);
  CHECK_THROWS_AS(CompactumSpec::holder(2.5, 1.0), PreconditionError);
  CHECK_THROWS_AS(CompactumSpec::holder(1.0, -1.0), PreconditionError);

  // Subgradient inequality phi(w) >= phi(v) + <s, w - v>, and |s| <= phi_lipschitz.
  Rng rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(3, 25));
    const auto spec = rng.coin() ? CompactumSpec::sup_norm(1.0) : CompactumSpec::holder(rng.uniform(0.2, 2.0), 1.0);
    const auto v = oracle::random_function(rng, n);
    const auto w = oracle::random_function(rng, n);
    const auto s = spec.phi_subgradient(v);
    double inner = 0.0;
    double norm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      inner += s[k] * (w[k] - v[k]);
      norm2 += s[k] * s[k];
    }
    const double pv = spec.phi(v);
    CHECK(spec.phi(w) >= pv + inner - 1e-9 * (1.0 + pv));
    CHECK(std::sqrt(norm2) <= spec.phi_lipschitz(n) * (1.0 + 1e-12));
  }
}

TEST_CASE("ProblemSpec") {
  CHECK_FALSE(ProblemSpec::integration().injective);
  CHECK(ProblemSpec::matrix(Eigen::MatrixXd::Identity(4, 4)).injective);
  Eigen::MatrixXd singular(2, 2);
  singular << 1, 2, 2, 4;
  CHECK_FALSE(ProblemSpec::matrix(singular).injective);
}

TEST_CASE("minimize: identity operator with zero data") {
  const auto prob = ProblemSpec::matrix(Eigen::MatrixXd::Identity(5, 5));
  for (double delta : {1e-3, 0.1, 2.0}) {
    const auto r = minimize(NoisyData(GridFunction::zeros(5), delta), CompactumSpec::sup_norm(1.0), prob, 100, 0);
    CHECK(r.v_delta == GridFunction::zeros(5));
    CHECK(r.objective_value == 0.0);
  }
}

TEST_CASE("minimize: 3-node instance against the exhaustive lattice optimum") {
  const auto u = GridFunction::constant(3, 1.0);
  const auto g = integrate(u);
  CHECK(g == GridFunction({0.0, 0.5, 1.0}));
  const double delta = 0.1;
  const double optimum = lattice_optimum_3(g, delta, 2.0);
  CHECK(optimum == doctest::Approx(0.1));

  const auto r = regularize_variational(NoisyData(g, delta), CompactumSpec::sup_norm(2.0),
                                        ProblemSpec::integration(), 20000, 0, sup_norm(u));
  CHECK(r.objective_value <= optimum + 0.02);
  CHECK(r.certificate_bound == doctest::Approx(0.4));
  CHECK(r.objective_value <= r.certificate_bound);
  CHECK(r.misfit <= delta);
  CHECK(r.phi_value <= 2.0);
}

TEST_CASE("minimize output invariants on random instances") {
  Rng rng(61);
  int solved = 0;
  for (int trial = 0; trial < 15; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(3, 60));
    const double delta = std::exp(rng.uniform(-7, -1));
    const bool holder = rng.coin();
    const auto spec = holder ? CompactumSpec::holder(rng.uniform(0.3, 2.0), 40.0) : CompactumSpec::sup_norm(2.0);
    const double slope = rng.uniform(-1, 1);
    const auto u = GridFunction::sample(n, [&](double x) { return 0.5 + slope * x; });
    const auto data = add_noise(integrate(u), delta, NoiseModel::UniformIid, rng.next_u64());
    const auto seed = rng.next_u64();
    try {
      const auto r = regularize_variational(data, spec, ProblemSpec::integration(), 2000, seed);
      CHECK(r.misfit <= delta);
      CHECK(r.phi_value <= spec.c);
      CHECK(r.objective_value == doctest::Approx(r.misfit + delta * r.phi_value).epsilon(1e-12));
      CHECK(r.objective_value ==
            doctest::Approx(objective(r.v_delta, data, spec, ProblemSpec::integration())).epsilon(1e-12));
      CHECK(r.certificate_bound == r.objective_value);
      ++solved;
    } catch (const InfeasibleError&) {
      // Allowed by contract; steep Holder classes near a = 2 make the search hard.
    }
  }
  CHECK(solved >= 13);
}

TEST_CASE("minimize under alternating worst-case noise") {
  const auto spec = CompactumSpec::sup_norm(2.0);
  for (std::size_t n : {3, 5, 11, 21}) {
    const auto u = GridFunction::constant(n, 1.0);
    const auto data = add_noise(integrate(u), 0.05, NoiseModel::AlternatingWorstCase, 0);
    const auto r = regularize_variational(data, spec, ProblemSpec::integration(), 2000, 0);
    CHECK(r.misfit <= 0.05);
    CHECK(r.phi_value <= 2.0);
  }
  // The feasible set is a thin sliver here: either a feasible output or the infeasible error.
  const auto u = GridFunction::constant(101, 1.0);
  const auto data = add_noise(integrate(u), 0.05, NoiseModel::AlternatingWorstCase, 0);
  try {
    const auto r = regularize_variational(data, spec, ProblemSpec::integration(), 2000, 0);
    CHECK(r.misfit <= 0.05);
    CHECK(r.phi_value <= 2.0);
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("infeasible problem") != std::string::npos);
  }
}

TEST_CASE("minimize certificate on exact data") {
  Rng rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(3, 80));
    const double level = rng.uniform(-1.5, 1.5);
    const auto u = GridFunction::constant(n, level);
    const double delta = std::exp(rng.uniform(-6, -1));
    const auto r = minimize(NoisyData(integrate(u), delta), CompactumSpec::sup_norm(2.0),
                            ProblemSpec::integration(), 5000, 0, sup_norm(u));
    CHECK(r.objective_value <= 2.0 * (1.0 + sup_norm(u)) * delta);
  }
}

TEST_CASE("minimize is deterministic and monotone in budget") {
  const auto u = GridFunction::sample(41, [](double x) { return 1.0 - x * x; });
  const auto data = add_noise(integrate(u), 0.01, NoiseModel::UniformIid, 4);
  const auto spec = CompactumSpec::sup_norm(2.0);
  const auto prob = ProblemSpec::integration();
  const auto a = minimize(data, spec, prob, 500, 9);
  const auto b = minimize(data, spec, prob, 500, 9);
  CHECK(a.v_delta == b.v_delta);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t budget : {0, 1, 10, 100, 1000, 5000}) {
    const double f = minimize(data, spec, prob, budget, 9).objective_value;
    CHECK(f <= previous);
    previous = f;
  }
}

TEST_CASE("minimize with c below phi(u)") {
  const auto u = GridFunction::constant(21, 1.0);
  const auto data = NoisyData(integrate(u), 1e-4);
  try {
    const auto r = regularize_variational(data, CompactumSpec::sup_norm(0.5), ProblemSpec::integration(), 200, 0);
    CHECK(r.misfit <= 1e-4);
    CHECK(r.phi_value <= 0.5);
    CHECK(sup_norm(r.v_delta - u) >= 0.5);
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("infeasible problem") != std::string::npos);
  }
  // Zero budget leaves no room for the feasibility search.
  CHECK_THROWS_AS(minimize(data, CompactumSpec::sup_norm(0.5), ProblemSpec::integration(), 0, 0), InfeasibleError);
}

TEST_CASE("regularize_variational error shrinks with delta for u = 1") {
  const auto u = GridFunction::constant(101, 1.0);
  const auto spec = CompactumSpec::sup_norm(2.0);
  double previous = std::numeric_limits<double>::infinity();
  for (double delta : {0.1, 0.03, 0.01}) {
    const auto r = regularize_variational(NoisyData(integrate(u), delta), spec, ProblemSpec::integration(), 20000, 0);
    const double err = sup_norm(r.v_delta - u);
    CHECK(err < previous);
    previous = err;
  }
}

TEST_CASE("convergence_study") {
  const auto u = GridFunction::constant(101, 1.0);
  const auto spec = CompactumSpec::sup_norm(2.0);
  const auto prob = ProblemSpec::integration();
  ConvergenceOptions options;
  options.ensemble_size = 20;

  CHECK(convergence_study(u, {}, spec, prob, options).empty());

  const double deltas[] = {1e-1, 3e-2, 1e-2};
  const auto rows = convergence_study(u, deltas, spec, prob, options);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].delta == deltas[i]);
    CHECK(rows[i].misfit <= rows[i].delta);
    CHECK(rows[i].phi <= 2.0);
    CHECK(rows[i].sup_err_ensemble >= 0.0);
    // Exact lattice modulus plus one lattice step of slack.
    CHECK(rows[i].sup_err_truth <= rows[i].omega_2delta + 0.2);
    if (i > 0) CHECK(rows[i].sup_err_truth <= rows[i - 1].sup_err_truth);
  }
  CHECK(rows[0].omega_2delta == doctest::Approx(0.2));
  CHECK(rows[2].omega_2delta == 0.0);

  std::stringstream ss;
  write_convergence_csv(ss, rows);
  CHECK(ss.str().starts_with("delta,misfit,phi,objective,sup_err_truth,sup_err_ensemble,omega_2delta\n"));
  const auto back = read_convergence_csv(ss);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].delta == rows[i].delta);
    CHECK(back[i].sup_err_truth == rows[i].sup_err_truth);
    CHECK(back[i].omega_2delta == rows[i].omega_2delta);
  }

  CHECK_THROWS_AS(convergence_study(u, deltas, CompactumSpec::sup_norm(0.5), prob, options), PreconditionError);
}
