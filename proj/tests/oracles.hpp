// Test-only reference computations. Deliberately naive: plain loops over the
// definitions, sharing no code with the library beyond GridFunction storage.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "wcreg/grid.hpp"
#include "wcreg/rng.hpp"

namespace oracle {

inline double node(std::size_t k, std::size_t n) { return static_cast<double>(k) / static_cast<double>(n - 1); }

/// Exhaustive pair scan of the discrete Holder norm.
inline double holder_norm(const wcreg::GridFunction& f, double a) {
  const std::size_t n = f.size();
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) sup = std::max(sup, std::abs(f[i]));
  if (a <= 1.0) {
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) q = std::max(q, std::abs(f[i] - f[j]) / std::pow(std::abs(node(i, n) - node(j, n)), a));
    return sup + q;
  }
  const double dx = 1.0 / static_cast<double>(n - 1);
  std::vector<double> s;
  for (std::size_t i = 0; i + 1 < n; ++i) s.push_back((f[i + 1] - f[i]) / dx);
  double ssup = 0.0;
  for (double v : s) ssup = std::max(ssup, std::abs(v));
  double q = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (i != j) q = std::max(q, std::abs(s[i] - s[j]) / std::pow(std::abs(node(i, n) - node(j, n)), a - 1.0));
  return sup + ssup + q;
}

/// Trapezoid cumulative integral written out term by term.
inline std::vector<double> trapezoid(const wcreg::GridFunction& v) {
  const std::size_t n = v.size();
  const double dx = 1.0 / static_cast<double>(n - 1);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) acc += 0.5 * dx * (v[j - 1] + v[j]);
    out[k] = acc;
  }
  return out;
}

inline wcreg::GridFunction random_function(wcreg::Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return wcreg::GridFunction(std::move(v));
}

/// Minimizes f over a uniform grid of h values in [lo, hi]; returns the argmin.
template <typename F>
double scan_argmin(F f, double lo, double hi, std::size_t samples) {
  double best_h = lo;
  double best = f(lo);
  for (std::size_t i = 1; i <= samples; ++i) {
    const double h = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples);
    const double v = f(h);
    if (v < best) {
      best = v;
      best_h = h;
    }
  }
  return best_h;
}

}  // namespace oracle
