#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wcreg/differentiator.hpp"
#include "wcreg/error.hpp"

using namespace wcreg;
using std::numbers::pi;

namespace {

double bound_fn(double delta, const HolderParams& p, double h) { return delta / h + p.M * std::pow(h, p.a - 1.0); }

}  // namespace

TEST_CASE("step_size matches the scanned minimizer of the bound") {
  // Oracle: brute-force scan of delta/h + M h^(a-1) over h.
  const HolderParams p1(2.0, 1.0);
  const double scanned1 = oracle::scan_argmin([&](double h) { return bound_fn(1e-4, p1, h); }, 1e-3, 0.1, 99000);
  CHECK(scanned1 == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(step_size(1e-4, p1, 1e-3) == doctest::Approx(0.01).epsilon(1e-12));

  const HolderParams p2(2.0, 4.0);
  const double scanned2 = oracle::scan_argmin([&](double h) { return bound_fn(4e-4, p2, h); }, 1e-3, 0.1, 99000);
  CHECK(scanned2 == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(step_size(4e-4, p2, 1e-3) == doctest::Approx(0.01).epsilon(1e-12));

  const HolderParams p3(1.5, 0.001);
  CHECK(optimal_step(0.1, p3) == doctest::Approx(std::pow(0.1 / 0.0005, 2.0 / 3.0)).epsilon(1e-12));
  CHECK(optimal_step(0.1, p3) == doctest::Approx(34.2).epsilon(1e-3));
  CHECK(step_size(0.1, p3, 1e-3) == 0.25);

  // Lower clamp at the grid spacing.
  CHECK(step_size(1e-12, p1, 0.01) == 0.01);
}

TEST_CASE("step_size errors") {
  CHECK_THROWS_AS(step_size(1e-3, HolderParams(1.0, 1.0), 1e-3), PreconditionError);
  CHECK_THROWS_AS(step_size(1e-3, HolderParams(0.5, 1.0), 1e-3), PreconditionError);
  CHECK_THROWS_AS(step_size(0.0, HolderParams(2.0, 1.0), 1e-3), PreconditionError);
  CHECK_THROWS_AS(step_size(-1.0, HolderParams(2.0, 1.0), 1e-3), PreconditionError);
}

TEST_CASE("unclipped step is stationary: +-1% perturbations increase the bound") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const HolderParams p(rng.uniform(1.05, 2.0), std::exp(rng.uniform(-2, 2)));
    const double delta = std::exp(rng.uniform(-14, -3));
    const double h = optimal_step(delta, p);
    const double at = bound_fn(delta, p, h);
    CHECK(bound_fn(delta, p, 1.01 * h) > at);
    CHECK(bound_fn(delta, p, 0.99 * h) > at);
  }
}

TEST_CASE("differentiate examples") {
  const auto g = GridFunction::sample(101, [](double x) { return x * x / 2; });
  const auto d = differentiate(NoisyData(g, 1e-6), 0.1);
  CHECK(d[50] == doctest::Approx(0.5).epsilon(1e-13));

  const auto c = differentiate(NoisyData(GridFunction::constant(41, 3.25), 1e-3), 0.1);
  CHECK(sup_norm(c) == 0.0);

  const auto s = GridFunction::sample(101, [](double x) { return std::sin(2 * pi * x); });
  const auto ds = differentiate(NoisyData(s, 1e-6), 0.01);
  const double identity_value = std::cos(pi) * std::sin(2 * pi * 0.01) / 0.01;
  CHECK(ds[50] == doctest::Approx(identity_value).epsilon(1e-12));
  CHECK(std::round(ds[50] * 1e5) / 1e5 == doctest::Approx(-6.27905).epsilon(1e-12));
}

TEST_CASE("differentiate zones") {
  // g = x^3 on 11 nodes, h = 0.2 (2 steps).
  const auto g = GridFunction::sample(11, [](double x) { return x * x * x; });
  const auto d = differentiate(NoisyData(g, 1e-3), 0.2);
  const auto x = [&](std::size_t k) { return g.x(k); };
  const auto cube = [](double t) { return t * t * t; };
  // x < h: forward
  CHECK(d[0] == doctest::Approx((cube(x(2)) - cube(x(0))) / 0.2));
  CHECK(d[1] == doctest::Approx((cube(x(3)) - cube(x(1))) / 0.2));
  // h <= x <= 1 - h: central
  CHECK(d[2] == doctest::Approx((cube(x(4)) - cube(x(0))) / 0.4));
  CHECK(d[8] == doctest::Approx((cube(x(10)) - cube(x(6))) / 0.4));
  // x > 1 - h: backward
  CHECK(d[9] == doctest::Approx((cube(x(9)) - cube(x(7))) / 0.2));
  CHECK(d[10] == doctest::Approx((cube(x(10)) - cube(x(8))) / 0.2));
}

TEST_CASE("differentiate errors") {
  const NoisyData data(GridFunction::zeros(11), 1e-3);
  CHECK_THROWS_AS(differentiate(data, 0.15), PreconditionError);
  CHECK_THROWS_AS(differentiate(data, 0.05), PreconditionError);
  CHECK_THROWS_AS(differentiate(data, 0.6), PreconditionError);
  CHECK_THROWS_AS(differentiate(data, 0.0), PreconditionError);
  CHECK_NOTHROW(differentiate(data, 0.5));
}

TEST_CASE("differentiate is linear and shift invariant") {
  Rng rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(5, 200));
    const auto steps = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>((n - 1) / 2)));
    const double h = static_cast<double>(steps) / static_cast<double>(n - 1);
    const auto g1 = oracle::random_function(rng, n);
    const auto g2 = oracle::random_function(rng, n);
    const double alpha = rng.uniform(-3, 3);
    const double beta = rng.uniform(-3, 3);

    const auto base = differentiate(NoisyData(g1, 1.0), h);
    const auto shifted = differentiate(NoisyData(g1 + GridFunction::constant(n, 0.5), 1.0), h);
    CHECK(sup_norm(shifted - base) <= 1e-12 * std::max(1.0, sup_norm(base)));

    const auto lhs = differentiate(NoisyData(alpha * g1 + beta * g2, 1.0), h);
    const auto rhs = alpha * base + beta * differentiate(NoisyData(g2, 1.0), h);
    CHECK(sup_norm(lhs - rhs) <= 1e-12 * std::max(1.0, sup_norm(rhs)));
  }
}

TEST_CASE("error_bound") {
  CHECK(error_bound(1e-4, HolderParams(2.0, 1.0), 0.01) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(error_bound(1e-2, HolderParams(2.0, 1.0), 0.1) == doctest::Approx(0.2).epsilon(1e-12));
  // M -> 0+: only the noise term remains.
  CHECK(error_bound(3e-3, HolderParams(1.7, 1e-300), 0.05) == doctest::Approx(3e-3 / 0.05).epsilon(1e-12));
  CHECK_THROWS_AS(error_bound(0.0, HolderParams(2.0, 1.0), 0.1), PreconditionError);
  CHECK_THROWS_AS(error_bound(1e-3, HolderParams(2.0, 1.0), 0.0), PreconditionError);
  CHECK_THROWS_AS(error_bound(1e-3, HolderParams(1.0, 1.0), 0.1), PreconditionError);
}

TEST_CASE("closed-form eta decays like delta^(1 - 1/a)") {
  for (double a : {1.25, 1.5, 2.0}) {
    const HolderParams p(a, 1.7);
    const double d1 = 1e-3;
    const double d2 = 1e-6;
    const double e1 = error_bound(d1, p, optimal_step(d1, p));
    const double e2 = error_bound(d2, p, optimal_step(d2, p));
    const double slope = std::log(e1 / e2) / std::log(d1 / d2);
    CHECK(slope == doctest::Approx(1.0 - 1.0 / a).epsilon(1e-12));
  }
}

TEST_CASE("regularize examples") {
  const std::size_t n = 1001;
  const HolderParams params(2.0, 1.0);

  SUBCASE("exact on quadratics") {
    const auto g = GridFunction::sample(n, [](double x) { return x * x / 2; });
    const auto out = regularize(NoisyData(g, 1e-6), params);
    const auto m = static_cast<std::size_t>(std::llround(out.h_used * (n - 1)));
    for (std::size_t k = m; k + m < n; ++k) CHECK(std::abs(out.u_delta[k] - g.x(k)) <= 1e-12);
  }

  SUBCASE("alternating noise on zero data cancels at interior nodes") {
    const double delta = 1e-4;
    const auto data = add_noise(GridFunction::zeros(n), delta, NoiseModel::AlternatingWorstCase, 0);
    const auto out = regularize(data, params);
    const auto m = static_cast<std::size_t>(std::llround(out.h_used * (n - 1)));
    CHECK(m == 10);
    // k + m and k - m share parity.
    for (std::size_t k = m; k + m < n; ++k) CHECK(out.u_delta[k] == 0.0);
    CHECK(std::abs(out.u_delta[0]) <= delta / out.h_used + 1e-15);
  }

  SUBCASE("sup error within eta for u = x") {
    const auto g = integrate(GridFunction::sample(n, [](double x) { return x; }));
    const auto data = add_noise(g, 1e-4, NoiseModel::UniformIid, 7);
    const auto out = regularize(data, params);
    CHECK(out.h_used == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(out.eta == doctest::Approx(0.02).epsilon(1e-12));
    const auto u = GridFunction::sample(n, [](double x) { return x; });
    CHECK(sup_norm(out.u_delta - u) <= out.eta);
  }

  SUBCASE("output invariants") {
    Rng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
      const auto nn = static_cast<std::size_t>(rng.uniform_int(5, 400));
      const double delta = std::exp(rng.uniform(-16, 0));
      const HolderParams p(rng.uniform(1.01, 2.0), std::exp(rng.uniform(-3, 3)));
      const auto out = regularize(NoisyData(oracle::random_function(rng, nn), delta), p);
      const double steps = out.h_used * static_cast<double>(nn - 1);
      CHECK(out.h_used > 0.0);
      CHECK(out.h_used <= 0.25);
      CHECK(std::abs(steps - std::round(steps)) <= 1e-9);
      CHECK(out.eta >= delta / out.h_used);
    }
  }
}

TEST_CASE("regularize errors") {
  CHECK_THROWS_AS(regularize(NoisyData(GridFunction::zeros(101), 1e-3), HolderParams(1.0, 1.0)),
                  PreconditionError);
  CHECK_THROWS_AS(regularize(NoisyData(GridFunction::zeros(4), 1e-3), HolderParams(2.0, 1.0)),
                  PreconditionError);
  CHECK_NOTHROW(regularize(NoisyData(GridFunction::zeros(5), 1e-3), HolderParams(2.0, 1.0)));
}
