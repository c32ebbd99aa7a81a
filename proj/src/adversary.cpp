#include "wcreg/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wcreg/error.hpp"
#include "wcreg/rng.hpp"

namespace wcreg {

FeasibleClass FeasibleClass::holder(const HolderParams& params, NoisyData data,
                                    std::optional<GridFunction> anchor) {
  if (anchor) require_same_grid(*anchor, data.g_delta, "FeasibleClass anchor");
  return FeasibleClass{ClassKind::Holder, params.a, params.M, std::move(data),
                       LinearMap::integration(), std::move(anchor)};
}

FeasibleClass FeasibleClass::sup_only(double M, NoisyData data, std::optional<GridFunction> anchor) {
  if (!(M > 0.0) || !std::isfinite(M)) throw PreconditionError("norm budget M must be > 0");
  if (anchor) require_same_grid(*anchor, data.g_delta, "FeasibleClass anchor");
  return FeasibleClass{ClassKind::SupOnly, 0.0, M, std::move(data), LinearMap::integration(),
                       std::move(anchor)};
}

double FeasibleClass::class_norm(const GridFunction& v) const {
  return kind == ClassKind::SupOnly ? sup_norm(v) : discrete_holder_norm(v, a);
}

std::string to_string(ClassKind kind) { return kind == ClassKind::SupOnly ? "sup" : "holder"; }

Membership is_feasible(const GridFunction& v, const FeasibleClass& cls) {
  require_same_grid(v, cls.data.g_delta, "is_feasible");
  const double misfit = sup_norm(cls.op.apply(v) - cls.data.g_delta);
  const double norm = cls.class_norm(v);
  return Membership{misfit, norm, misfit <= cls.delta() && norm <= cls.M};
}

double feasible_extent(const FeasibleClass& cls, const GridFunction& base,
                       const GridFunction& direction) {
  require_same_grid(base, direction, "feasible_extent");
  if (!is_feasible(base, cls).feasible) return 0.0;
  const double dir_norm = cls.class_norm(direction);
  if (sup_norm(direction) == 0.0 || dir_norm == 0.0) return 0.0;

  // Misfit constraint: |r_k + t q_k| <= delta is an interval in t containing 0.
  const auto r = cls.op.apply(base) - cls.data.g_delta;
  const auto q = cls.op.apply(direction);
  const double delta = cls.delta();
  double t_hi = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q[k] > 0.0) t_hi = std::min(t_hi, (delta - r[k]) / q[k]);
    if (q[k] < 0.0) t_hi = std::min(t_hi, (-delta - r[k]) / q[k]);
  }
  t_hi = std::max(t_hi, 0.0);

  // Norm constraint: convex in t, and violated beyond (M + ||base||) / ||dir||.
  t_hi = std::min(t_hi, (cls.M + cls.class_norm(base)) / dir_norm);
  auto norm_ok = [&](double t) { return cls.class_norm(base + t * direction) <= cls.M; };

  double t = t_hi;
  if (!norm_ok(t_hi)) {
    double lo = 0.0;
    double hi = t_hi;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (norm_ok(mid) ? lo : hi) = mid;
    }
    t = lo;
  }
  // Certify; rounding in the closed-form misfit bound can overshoot by ulps.
  for (int shrink = 0; shrink < 8 && t > 0.0; ++shrink) {
    if (is_feasible(base + t * direction, cls).feasible) return t;
    t *= 1.0 - std::ldexp(1.0, 4 * shrink - 44);
  }
  return 0.0;
}

namespace {

GridFunction random_direction(Rng& rng, std::size_t n) {
  const double dx = 1.0 / static_cast<double>(n - 1);
  if (rng.coin()) {
    const auto k_max = std::max<std::int64_t>(1, std::min<std::int64_t>(64, static_cast<std::int64_t>(n - 1) / 8));
    const double k = static_cast<double>(rng.uniform_int(1, k_max));
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return GridFunction::sample(n, [&](double x) { return std::sin(2.0 * std::numbers::pi * k * x + phase); });
  }
  const double center = rng.uniform();
  const double width = rng.uniform(std::min(2.0 * dx, 0.5), 0.5);
  return GridFunction::sample(n, [&](double x) { return std::max(0.0, 1.0 - std::abs(x - center) / width); });
}

std::optional<GridFunction> feasible_base(const FeasibleClass& cls) {
  if (cls.anchor && is_feasible(*cls.anchor, cls).feasible) return cls.anchor;
  auto zero = GridFunction::zeros(cls.grid_size());
  if (is_feasible(zero, cls).feasible) return zero;
  return std::nullopt;
}

// Certified separation of the pair (base - t_minus dir, base + t_plus dir).
double symmetric_separation(const FeasibleClass& cls, const GridFunction& base,
                            const GridFunction& dir) {
  const double t_plus = feasible_extent(cls, base, dir);
  const double t_minus = feasible_extent(cls, base, -1.0 * dir);
  const auto hi = base + t_plus * dir;
  const auto lo = base - t_minus * dir;
  if (!is_feasible(hi, cls).feasible || !is_feasible(lo, cls).feasible) return 0.0;
  return sup_norm(hi - lo);
}

double certified_pair_separation(const FeasibleClass& cls, const AdversarialPair& pair) {
  if (pair.v1.size() != cls.grid_size()) return 0.0;
  if (!is_feasible(pair.v1, cls).feasible || !is_feasible(pair.v2, cls).feasible) return 0.0;
  return pair.separation;
}

AdversarialPair assemble_pair(const FeasibleClass& cls, GridFunction v1, GridFunction v2) {
  auto c1 = is_feasible(v1, cls);
  auto c2 = is_feasible(v2, cls);
  if (!c1.feasible || !c2.feasible) {
    throw InfeasibleError("adversarial pair failed certification (misfit " +
                          format_double(std::max(c1.misfit, c2.misfit)) + ", norm " +
                          format_double(std::max(c1.norm, c2.norm)) + ")");
  }
  const double sep = sup_norm(v1 - v2);
  return AdversarialPair{cls.kind, cls.M, cls.delta(), std::move(v1), std::move(v2), sep, c1, c2};
}

GridFunction bump_shape(std::size_t n, double height, double slope) {
  return GridFunction::sample(n, [&](double x) { return std::max(0.0, height - slope * std::abs(x - 0.5)); });
}

}  // namespace

std::vector<GridFunction> sample_feasible(const FeasibleClass& cls, std::size_t count,
                                          std::uint64_t seed) {
  std::vector<GridFunction> out;
  if (count == 0) return out;
  const GridFunction base = cls.anchor ? *cls.anchor : GridFunction::zeros(cls.grid_size());
  if (!is_feasible(base, cls).feasible) {
    throw InfeasibleError("no feasible point found: seed element fails the membership test");
  }
  out.reserve(count);
  const std::size_t n = cls.grid_size();
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, i);
    for (int attempt = 0; attempt < 32; ++attempt) {
      auto dir = random_direction(rng, n);
      if (rng.coin()) dir *= -1.0;
      const double t_max = feasible_extent(cls, base, dir);
      if (!(t_max > 0.0)) continue;
      auto v = base + (t_max * rng.uniform(0.5, 1.0)) * dir;
      if (is_feasible(v, cls).feasible) {
        out.push_back(std::move(v));
        break;
      }
    }
  }
  return out;
}

SupErrorEstimate sup_error_estimate(const GridFunction& reconstruction, const FeasibleClass& cls,
                                    std::span<const GridFunction> ensemble) {
  if (ensemble.empty()) throw PreconditionError("sup_error_estimate needs a nonempty ensemble");
  require_same_grid(reconstruction, cls.data.g_delta, "sup_error_estimate");
  double worst = 0.0;
  for (const auto& v : ensemble) {
    if (!is_feasible(v, cls).feasible) {
      throw PreconditionError("sup_error_estimate: ensemble member is not feasible");
    }
    worst = std::max(worst, sup_norm(reconstruction - v));
  }
  return SupErrorEstimate{worst, ensemble.size()};
}

std::size_t sine_frequency(double M, double delta) {
  if (!(M > 0.0) || !(delta > 0.0)) throw PreconditionError("sine_pair needs M > 0 and delta > 0");
  return static_cast<std::size_t>(std::max(1.0, std::ceil(M / (std::numbers::pi * delta))));
}

AdversarialPair sine_pair(double M, double delta, std::size_t n) {
  const std::size_t k = sine_frequency(M, delta);
  if (n < 20 * k) {
    throw PreconditionError("grid too coarse for sine_pair: frequency " + std::to_string(k) +
                            " needs at least " + std::to_string(20 * k) + " nodes");
  }
  const auto cls = FeasibleClass::sup_only(M, NoisyData(GridFunction::zeros(n), delta));
  const double freq = 2.0 * std::numbers::pi * static_cast<double>(k);
  auto v2 = GridFunction::sample(n, [&](double x) { return M * std::sin(freq * x); });
  return assemble_pair(cls, GridFunction::zeros(n), std::move(v2));
}

AdversarialPair bump_pair(double M, double delta, std::size_t n) {
  if (!(M > 0.0) || !(delta > 0.0)) throw PreconditionError("bump_pair needs M > 0 and delta > 0");
  const auto cls = FeasibleClass::holder(HolderParams(1.0, M), NoisyData(GridFunction::zeros(n), delta));
  const double height = std::min(std::sqrt(delta * M / 2.0), M / 2.0);
  auto v2 = bump_shape(n, height, M / 2.0);
  // The sampled bump's integral is 2 m^2 / M = delta and its norm m + M / 2 <= M up to
  // rounding; trim any overshoot.
  const double area = sup_norm(integrate(v2));
  if (area > delta) v2 *= delta / area;
  while (sup_norm(integrate(v2)) > delta || cls.class_norm(v2) > M) v2 *= 1.0 - 1e-15;
  return assemble_pair(cls, GridFunction::zeros(n), std::move(v2));
}

double diameter_probe(const FeasibleClass& cls, std::span<const Generator> generators,
                      std::size_t budget, std::uint64_t seed) {
  const std::size_t n = cls.grid_size();
  const auto base = feasible_base(cls);
  const auto has = [&](Generator g) {
    return std::find(generators.begin(), generators.end(), g) != generators.end();
  };

  double best = 0.0;
  if (has(Generator::Sine)) {
    std::size_t k = sine_frequency(cls.M, cls.delta());
    if (n >= 20 * k) {
      if (cls.kind == ClassKind::SupOnly) {
        best = std::max(best, certified_pair_separation(cls, sine_pair(cls.M, cls.delta(), n)));
      }
    } else {
      k = std::max<std::size_t>(1, n / 20);
    }
    if (base) {
      const double freq = 2.0 * std::numbers::pi * static_cast<double>(k);
      const auto dir = GridFunction::sample(n, [&](double x) { return std::sin(freq * x); });
      best = std::max(best, symmetric_separation(cls, *base, dir));
    }
  }
  if (has(Generator::Bump) && n >= 3) {
    const auto pair = bump_pair(cls.M, cls.delta(), n);
    if (cls.kind == ClassKind::Holder && cls.a == 1.0) {
      best = std::max(best, certified_pair_separation(cls, pair));
    }
    if (base && pair.separation > 0.0) {
      best = std::max(best, symmetric_separation(cls, *base, (1.0 / pair.separation) * pair.v2));
    }
  }
  if (has(Generator::RandomSearch) && base) {
    for (std::size_t i = 0; i < budget; ++i) {
      Rng rng(seed, i);
      best = std::max(best, symmetric_separation(cls, *base, random_direction(rng, n)));
    }
  }
  return best;
}

void write_pair_csv(std::ostream& out, const AdversarialPair& pair) {
  out << "# kind=" << to_string(pair.kind) << '\n'
      << "# M=" << format_double(pair.M) << '\n'
      << "# delta=" << format_double(pair.delta) << '\n'
      << "# misfit_v1=" << format_double(pair.certificate1.misfit) << '\n'
      << "# norm_v1=" << format_double(pair.certificate1.norm) << '\n'
      << "# feasible_v1=" << (pair.certificate1.feasible ? 1 : 0) << '\n'
      << "# misfit_v2=" << format_double(pair.certificate2.misfit) << '\n'
      << "# norm_v2=" << format_double(pair.certificate2.norm) << '\n'
      << "# feasible_v2=" << (pair.certificate2.feasible ? 1 : 0) << '\n'
      << "# separation=" << format_double(pair.separation) << '\n'
      << "x1,v1,x2,v2\n";
  for (std::size_t k = 0; k < pair.v1.size(); ++k) {
    const auto x = format_double(pair.v1.x(k));
    out << x << ',' << format_double(pair.v1[k]) << ',' << x << ',' << format_double(pair.v2[k]) << '\n';
  }
}

AdversarialPair read_pair_csv(std::istream& in) {
  std::map<std::string, std::string> meta;
  std::vector<double> v1;
  std::vector<double> v2;
  std::string line;
  bool header = false;
  auto parse = [](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::logic_error&) {
    }
    throw PreconditionError("malformed number in pair CSV: '" + s + "'");
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) meta[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (!header) {
      if (line != "x1,v1,x2,v2") throw PreconditionError("expected pair CSV header 'x1,v1,x2,v2'");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 4) throw PreconditionError("pair CSV rows need 4 columns");
    v1.push_back(parse(cells[1]));
    v2.push_back(parse(cells[3]));
  }
  const char* required[] = {"kind", "M", "delta", "misfit_v1", "norm_v1", "feasible_v1",
                            "misfit_v2", "norm_v2", "feasible_v2", "separation"};
  for (const char* key : required) {
    if (!meta.contains(key)) throw PreconditionError(std::string("pair CSV lacks certificate key ") + key);
  }
  const auto kind = meta["kind"] == "sup" ? ClassKind::SupOnly : ClassKind::Holder;
  return AdversarialPair{kind,
                         parse(meta["M"]),
                         parse(meta["delta"]),
                         GridFunction(std::move(v1)),
                         GridFunction(std::move(v2)),
                         parse(meta["separation"]),
                         Membership{parse(meta["misfit_v1"]), parse(meta["norm_v1"]), meta["feasible_v1"] == "1"},
                         Membership{parse(meta["misfit_v2"]), parse(meta["norm_v2"]), meta["feasible_v2"] == "1"}};
}

}  // namespace wcreg
