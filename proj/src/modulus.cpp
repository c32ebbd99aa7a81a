#include "wcreg/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "wcreg/adversary.hpp"
#include "wcreg/csv.hpp"
#include "wcreg/error.hpp"
#include "wcreg/rng.hpp"

namespace wcreg {

LatticeCompactum LatticeCompactum::full(std::size_t nodes, std::vector<double> levels, CompactumSpec spec) {
  if (nodes < 2) throw PreconditionError("lattice compactum needs at least 2 nodes");
  if (levels.empty()) throw PreconditionError("lattice compactum needs at least one level");
  return LatticeCompactum{nodes, std::move(levels), spec, LatticeKind::Full};
}

LatticeCompactum LatticeCompactum::constants(std::vector<double> levels, CompactumSpec spec, std::size_t nodes) {
  auto lat = full(nodes, std::move(levels), spec);
  lat.kind = LatticeKind::Constants;
  return lat;
}

double LatticeCompactum::raw_count() const {
  const auto l = static_cast<double>(levels.size());
  return kind == LatticeKind::Constants ? l : std::pow(l, static_cast<double>(nodes));
}

std::vector<GridFunction> LatticeCompactum::members() const {
  std::vector<GridFunction> out;
  const auto keep = [&](GridFunction f) {
    if (spec.phi(f) <= spec.c) out.push_back(std::move(f));
  };
  if (kind == LatticeKind::Constants) {
    for (double level : levels) keep(GridFunction::constant(nodes, level));
    return out;
  }
  if (raw_count() > kMaxModulusPairs) {
    throw PreconditionError("lattice compactum too large to enumerate");
  }
  std::vector<std::size_t> digit(nodes, 0);
  std::vector<double> values(nodes, levels.front());
  while (true) {
    keep(GridFunction(values));
    std::size_t pos = 0;
    while (pos < nodes && ++digit[pos] == levels.size()) {
      digit[pos] = 0;
      values[pos] = levels[0];
      ++pos;
    }
    if (pos == nodes) break;
    values[pos] = levels[digit[pos]];
  }
  return out;
}

std::vector<double> uniform_levels(double lo, double hi, std::size_t count) {
  if (count < 2) throw PreconditionError("uniform_levels needs at least 2 levels");
  const auto m = static_cast<double>(count - 1);
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto kk = static_cast<double>(k);
    out[k] = (lo * (m - kk) + hi * kk) / m;
  }
  return out;
}

namespace {

double sup_distance(const GridFunction& f, const GridFunction& g) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f[k] - g[k]));
  return m;
}

struct EnumeratedLattice {
  std::vector<GridFunction> members;
  std::vector<GridFunction> images;
};

EnumeratedLattice enumerate(const LatticeCompactum& lattice, const ProblemSpec& prob) {
  EnumeratedLattice e;
  e.members = lattice.members();
  e.images.reserve(e.members.size());
  for (const auto& v : e.members) e.images.push_back(prob.op.apply(v));
  return e;
}

void require_delta(double delta) {
  if (!(delta >= 0.0) || std::isnan(delta)) throw PreconditionError("delta must be >= 0");
}

}  // namespace

double modulus_bruteforce(const LatticeCompactum& lattice, double delta, const ProblemSpec& prob) {
  require_delta(delta);
  const auto e = enumerate(lattice, prob);
  const auto m = static_cast<double>(e.members.size());
  if (m * (m - 1.0) / 2.0 > kMaxModulusPairs) {
    throw PreconditionError("pair budget exceeded: " + format_double(m * (m - 1.0) / 2.0) +
                            " pairs > " + format_double(kMaxModulusPairs));
  }
  double best = 0.0;
  for (std::size_t i = 0; i < e.members.size(); ++i) {
    for (std::size_t j = i + 1; j < e.members.size(); ++j) {
      const double sep = sup_distance(e.members[i], e.members[j]);
      if (sep <= best) continue;
      if (sup_distance(e.images[i], e.images[j]) <= delta) best = sep;
    }
  }
  return best;
}

double modulus_search(const LatticeCompactum& lattice, double delta, const ProblemSpec& prob,
                      std::size_t budget, std::uint64_t seed) {
  require_delta(delta);
  const auto e = enumerate(lattice, prob);
  if (e.members.size() < 2) return 0.0;
  const auto last = static_cast<std::int64_t>(e.members.size()) - 1;
  double best = 0.0;
  for (std::size_t b = 0; b < budget; ++b) {
    Rng rng(seed, b);
    const auto i = static_cast<std::size_t>(rng.uniform_int(0, last));
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, last));
    const double sep = sup_distance(e.members[i], e.members[j]);
    if (sep > best && sup_distance(e.images[i], e.images[j]) <= delta) best = sep;
  }
  return best;
}

namespace {

// Largest t >= 0 with phi(base + t dir) <= c, given phi(base) <= c.
double phi_extent(const CompactumSpec& spec, const GridFunction& base, const GridFunction& dir) {
  const double dir_phi = spec.phi(dir);
  if (dir_phi == 0.0) return 0.0;
  double hi = (spec.c + spec.phi(base)) / dir_phi;
  double lo = 0.0;
  if (spec.phi(base + hi * dir) <= spec.c) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (spec.phi(base + mid * dir) <= spec.c ? lo : hi) = mid;
  }
  return lo;
}

struct PairCheck {
  const CompactumSpec& spec;
  const ProblemSpec& prob;
  double delta;

  double separation(const GridFunction& v, const GridFunction& w) const {
    if (spec.phi(v) > spec.c || spec.phi(w) > spec.c) return 0.0;
    if (sup_norm(prob.op.apply(v) - prob.op.apply(w)) > delta) return 0.0;
    return sup_norm(v - w);
  }

  // Widest pair base - s dir, base + t dir within K_c and the image budget.
  double along(const GridFunction& base, const GridFunction& dir) const {
    if (spec.phi(base) > spec.c) return 0.0;
    const double image = sup_norm(prob.op.apply(dir));
    const double plus = phi_extent(spec, base, dir);
    const double minus = phi_extent(spec, base, -1.0 * dir);
    double total = plus + minus;
    if (image > 0.0) total = std::min(total, delta / image);
    const double t = std::min(plus, total);
    const double s = std::min(minus, total - t);
    // Rounding in delta / image can overshoot the image budget by ulps.
    double shrink = 1.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      const double sep = separation(base - (s * shrink) * dir, base + (t * shrink) * dir);
      if (sep > 0.0) return sep;
      shrink *= 1.0 - std::ldexp(1.0, 4 * attempt - 44);
    }
    return 0.0;
  }
};

GridFunction random_shape(Rng& rng, std::size_t n) {
  const double dx = 1.0 / static_cast<double>(n - 1);
  if (rng.coin()) {
    const auto k_max = std::max<std::int64_t>(1, std::min<std::int64_t>(64, static_cast<std::int64_t>(n - 1) / 4));
    const double k = static_cast<double>(rng.uniform_int(1, k_max));
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return GridFunction::sample(n, [&](double x) { return std::sin(2.0 * std::numbers::pi * k * x + phase); });
  }
  const double center = rng.uniform();
  const double width = rng.uniform(std::min(2.0 * dx, 0.5), 0.5);
  return GridFunction::sample(n, [&](double x) { return std::max(0.0, 1.0 - std::abs(x - center) / width); });
}

}  // namespace

double modulus_search(const CompactumSpec& spec, std::size_t n, double delta, const ProblemSpec& prob,
                      std::size_t budget, std::uint64_t seed) {
  require_delta(delta);
  if (budget == 0) throw PreconditionError("modulus_search needs budget > 0");
  const PairCheck check{spec, prob, delta};
  double best = 0.0;

  if (prob.op.is_integration() && delta > 0.0) {
    if (spec.kind == PhiKind::SupNorm && n >= 20 * sine_frequency(spec.c, delta)) {
      const auto pair = sine_pair(spec.c, delta, n);
      best = std::max(best, check.separation(pair.v1, pair.v2));
    }
    if (spec.kind == PhiKind::HolderNorm && spec.a == 1.0 && n >= 3) {
      const auto pair = bump_pair(spec.c, delta, n);
      best = std::max(best, check.separation(pair.v1, pair.v2));
    }
  }

  const auto zero = GridFunction::zeros(n);
  for (std::size_t b = 0; b < budget; ++b) {
    Rng rng(seed, b);
    GridFunction base = zero;
    if (rng.coin()) {
      auto shape = random_shape(rng, n);
      base = (rng.uniform(0.0, 1.0) * phi_extent(spec, zero, shape)) * shape;
    }
    best = std::max(best, check.along(base, random_shape(rng, n)));
  }
  return best;
}

void write_modulus_csv(std::ostream& out, std::span<const ModulusRow> rows) {
  out << "delta,omega\n";
  for (const auto& r : rows) {
    const double vals[] = {r.delta, r.omega};
    write_numeric_row(out, vals);
  }
}

std::vector<ModulusRow> read_modulus_csv(std::istream& in) {
  const auto table = read_numeric_csv(in, "delta,omega");
  std::vector<ModulusRow> rows;
  for (const auto& r : table.rows) rows.push_back({r[0], r[1]});
  return rows;
}

}  // namespace wcreg
