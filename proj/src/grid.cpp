#include "wcreg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "wcreg/error.hpp"
#include "wcreg/rng.hpp"

namespace wcreg {

GridFunction::GridFunction(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw PreconditionError("GridFunction needs at least 2 nodes");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw PreconditionError("GridFunction values must be finite");
  }
}

GridFunction GridFunction::zeros(std::size_t n) { return constant(n, 0.0); }

GridFunction GridFunction::constant(std::size_t n, double c) {
  return GridFunction(std::vector<double>(n, c));
}

GridFunction GridFunction::sample(std::size_t n, const std::function<double(double)>& f) {
  if (n < 2) throw PreconditionError("GridFunction needs at least 2 nodes");
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = f(static_cast<double>(k) / static_cast<double>(n - 1));
  }
  return GridFunction(std::move(v));
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_grid(*this, other, "operator+");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_grid(*this, other, "operator-");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

void require_same_grid(const GridFunction& f, const GridFunction& g, const char* what) {
  if (f.size() != g.size()) {
    throw GridMismatchError(std::string(what) + ": grid mismatch (" + std::to_string(f.size()) +
                            " vs " + std::to_string(g.size()) + " nodes)");
  }
}

HolderParams::HolderParams(double exponent, double budget) : a(exponent), M(budget) {
  if (!(a > 0.0 && a <= 2.0)) throw PreconditionError("Holder exponent a must lie in (0, 2]");
  if (!(M > 0.0) || !std::isfinite(M)) throw PreconditionError("norm budget M must be > 0");
}

NoisyData::NoisyData(GridFunction g, double noise_level)
    : g_delta(std::move(g)), delta(noise_level) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw PreconditionError("noise level delta must be > 0");
  }
}

double sup_norm(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

std::size_t sup_argmax(const GridFunction& f) {
  std::size_t best = 0;
  double m = -1.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (std::abs(f[k]) > m) {
      m = std::abs(f[k]);
      best = k;
    }
  }
  return best;
}

namespace {

struct QuotientMax {
  double value = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
};

// max_{i<j} |s_i - s_j| / ((j - i) dx)^b over the sequence s.
QuotientMax holder_quotient(std::span<const double> s, double dx, double b) {
  QuotientMax q;
  const std::size_t m = s.size();
  if (m < 2) return q;
  if (b == 1.0) {
    // Lipschitz quotients of a sequence on a uniform lattice peak at neighbours.
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double r = std::abs(s[i + 1] - s[i]) / dx;
      if (r > q.value) q = {r, i, i + 1};
    }
    return q;
  }
  std::vector<double> inv_pow(m);
  for (std::size_t d = 1; d < m; ++d) inv_pow[d] = 1.0 / std::pow(static_cast<double>(d) * dx, b);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double r = std::abs(s[j] - s[i]) * inv_pow[j - i];
      if (r > q.value) q = {r, i, j};
    }
  }
  return q;
}

}  // namespace

HolderNormParts holder_norm_parts(const GridFunction& f, double a) {
  if (!(a > 0.0 && a <= 2.0)) throw PreconditionError("Holder exponent a must lie in (0, 2]");
  if (f.size() < 3) throw PreconditionError("discrete Holder norm needs at least 3 nodes");

  HolderNormParts parts;
  parts.sup_index = sup_argmax(f);
  parts.sup = std::abs(f[parts.sup_index]);
  const double dx = f.spacing();

  if (a <= 1.0) {
    const auto q = holder_quotient(f.values(), dx, a);
    parts.quotient = q.value;
    parts.quotient_i = q.i;
    parts.quotient_j = q.j;
    return parts;
  }

  std::vector<double> slopes(f.size() - 1);
  for (std::size_t i = 0; i + 1 < f.size(); ++i) slopes[i] = (f[i + 1] - f[i]) / dx;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    if (std::abs(slopes[i]) > parts.slope_sup) {
      parts.slope_sup = std::abs(slopes[i]);
      parts.slope_index = i;
    }
  }
  const auto q = holder_quotient(slopes, dx, a - 1.0);
  parts.quotient = q.value;
  parts.quotient_i = q.i;
  parts.quotient_j = q.j;
  return parts;
}

double discrete_holder_norm(const GridFunction& f, double a) {
  return holder_norm_parts(f, a).total();
}

GridFunction integrate(const GridFunction& v) {
  // Running sum of (v_{k-1} + v_k), divided by 2 (n - 1) once per node, so
  // integer-valued sums (e.g. constants) land exactly on k / (n - 1).
  const double denom = 2.0 * static_cast<double>(v.size() - 1);
  std::vector<double> out(v.size());
  out[0] = 0.0;
  double sum = 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    sum += v[k - 1] + v[k];
    out[k] = sum / denom;
  }
  return GridFunction(std::move(out));
}

GridFunction integrate_transpose(const GridFunction& r) {
  // Trapezoid weights: A_kj = w / (2 (n - 1)) with w = 1 at j in {0, k}, 2 for 0 < j < k.
  const std::size_t n = r.size();
  const double denom = 2.0 * static_cast<double>(n - 1);
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] + r[k];
  std::vector<double> out(n);
  out[0] = suffix[1] / denom;
  for (std::size_t j = 1; j < n; ++j) out[j] = (2.0 * suffix[j + 1] + r[j]) / denom;
  return GridFunction(std::move(out));
}

NoisyData add_noise(const GridFunction& g, double delta, NoiseModel model, std::uint64_t seed) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw PreconditionError("noise level delta must be > 0");
  }
  Rng rng(seed);
  std::vector<double> out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double e = model == NoiseModel::UniformIid ? rng.uniform(-delta, delta)
                                                     : (k % 2 == 0 ? delta : -delta);
    double v = g[k] + e;
    // Rounding of g + e can overshoot the ball by an ulp; pull back toward g.
    while (std::abs(v - g[k]) > delta) v = std::nextafter(v, g[k]);
    out[k] = v;
  }
  return NoisyData(GridFunction(std::move(out)), delta);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const GridFunction& f) {
  out << "x,value\n";
  for (std::size_t k = 0; k < f.size(); ++k) {
    out << format_double(f.x(k)) << ',' << format_double(f[k]) << '\n';
  }
}

std::string to_csv(const GridFunction& f) {
  std::ostringstream os;
  write_csv(os, f);
  return os.str();
}

GridFunction read_csv(std::istream& in) {
  std::string line;
  bool header_seen = false;
  std::vector<double> xs;
  std::vector<double> vs;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "x,value") throw PreconditionError("expected CSV header 'x,value', got '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw PreconditionError("malformed CSV row: '" + line + "'");
    try {
      std::size_t used = 0;
      const std::string xs_str = line.substr(0, comma);
      const std::string vs_str = line.substr(comma + 1);
      xs.push_back(std::stod(xs_str, &used));
      if (used != xs_str.size()) throw std::invalid_argument(xs_str);
      vs.push_back(std::stod(vs_str, &used));
      if (used != vs_str.size()) throw std::invalid_argument(vs_str);
    } catch (const std::logic_error&) {
      throw PreconditionError("malformed CSV row: '" + line + "'");
    }
  }
  if (!header_seen) throw PreconditionError("empty CSV input");
  if (vs.size() < 2) throw PreconditionError("CSV needs at least 2 rows");
  const auto n = vs.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = static_cast<double>(k) / static_cast<double>(n - 1);
    if (std::abs(xs[k] - expected) > 1e-12) {
      throw PreconditionError("x column is not the uniform grid over [0,1] at row " + std::to_string(k));
    }
  }
  return GridFunction(std::move(vs));
}

}  // namespace wcreg
