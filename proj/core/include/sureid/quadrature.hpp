// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

#include "sureid/errors.hpp"

namespace sureid {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int intervals = 0;
  bool converged = false;
};

namespace detail {

// Gauss7/Kronrod15 abscissae and weights on [0,1] (positive half).
// Column order: node, Gauss-7 weight, Kronrod-15 weight.
inline constexpr double kGK15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

inline constexpr double kGL8_x[4] = {
    0.1834346424956498049, 0.5255324099163289858,
    0.7966664774136267395, 0.9602898564975362316};
inline constexpr double kGL8_w[4] = {
    0.3626837833783619830, 0.3137066458778872873,
    0.2223810344533744705, 0.1012285362903762592};

inline constexpr double kGL16_x[8] = {
    0.0950125098376374402, 0.2816035507792589132,
    0.4580167776572273863, 0.6178762444026437484,
    0.7554044083550030339, 0.8656312023878317439,
    0.9445750230732325761, 0.9894009349916499326};
inline constexpr double kGL16_w[8] = {
    0.1894506104550684963, 0.1826034150449235888,
    0.1691565193950025382, 0.1495959888165767320,
    0.1246289712555338721, 0.0951585116824927848,
    0.0622535239386478929, 0.0271524594117540949};

template <class Func>
std::pair<double, double> gk15_panel(const Func& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double y0 = f(mid);
  double g7 = kGK15[0][1] * y0;
  double k15 = kGK15[0][2] * y0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kGK15[i][0];
    const double yi = f(mid + dx) + f(mid - dx);
    g7 += kGK15[i][1] * yi;
    k15 += kGK15[i][2] * yi;
  }
  g7 *= half;
  k15 *= half;

  // classic QUADPACK-style error heuristic
  double err = 200.0 * std::abs(g7 - k15);
  err = err * std::sqrt(err);
  err = std::max(err, std::abs(g7 - k15));
  return {k15, err};
}

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b].
template <class Func>
QuadResult integrate_gk(const Func& f, double a, double b,
                        const QuadOptions& opts = {}) {
  QuadResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }

  std::priority_queue<detail::Interval> heap;
  auto [v0, e0] = detail::gk15_panel(f, a, b);
  heap.push({a, b, v0, e0});
  double total_v = v0;
  double total_e = e0;
  int n = 1;

  while (total_e > std::max(opts.abs_tol, opts.rel_tol * std::abs(total_v)) &&
         n < opts.max_intervals) {
    detail::Interval worst = heap.top();
    heap.pop();
    total_v -= worst.value;
    total_e -= worst.error;

    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval at floating-point resolution; accept as-is
      total_v += worst.value;
      total_e += worst.error;
      break;
    }
    auto [vl, el] = detail::gk15_panel(f, worst.a, mid);
    auto [vr, er] = detail::gk15_panel(f, mid, worst.b);
    heap.push({worst.a, mid, vl, el});
    heap.push({mid, worst.b, vr, er});
    total_v += vl + vr;
    total_e += el + er;
    ++n;
  }

  res.value = total_v;
  res.error = total_e;
  res.intervals = n;
  res.converged =
      total_e <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total_v));
  return res;
}

/// Integrates f over [a, b] split at the given interior breakpoints
/// (function kinks, jumps). Breakpoints outside (a, b) are ignored.
template <class Func>
QuadResult integrate_gk_split(const Func& f, double a, double b,
                              std::span<const double> breakpoints,
                              const QuadOptions& opts = {}) {
  std::vector<double> pts;
  pts.push_back(a);
  for (double p : breakpoints)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());

  QuadOptions sub = opts;
  sub.abs_tol = opts.abs_tol / static_cast<double>(pts.size());
  QuadResult total;
  total.converged = true;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i] == pts[i + 1]) continue;
    QuadResult r = integrate_gk(f, pts[i], pts[i + 1], sub);
    total.value += r.value;
    total.error += r.error;
    total.intervals += r.intervals;
    total.converged = total.converged && r.converged;
  }
  return total;
}

/// Fixed 8-point Gauss-Legendre panel; exact for degree <= 15 polynomials.
template <class Func>
double gauss_legendre_8(const Func& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double dx = half * detail::kGL8_x[i];
    s += detail::kGL8_w[i] * (f(mid + dx) + f(mid - dx));
  }
  return s * half;
}

/// Composite 16-point Gauss-Legendre with `panels` equal subdivisions.
template <class Func>
double gauss_legendre_16(const Func& f, double a, double b, int panels = 1) {
  double s = 0.0;
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + p * w;
    const double mid = pa + 0.5 * w;
    const double half = 0.5 * w;
    double ps = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double dx = half * detail::kGL16_x[i];
      ps += detail::kGL16_w[i] * (f(mid + dx) + f(mid - dx));
    }
    s += ps * half;
  }
  return s;
}

/// Prefix integrals of f over a strictly increasing grid: out[i] holds
/// the integral from grid[0] to grid[i], accumulated in long double.
template <class Func>
std::vector<double> cumulative_integral(const Func& f,
                                        std::span<const double> grid) {
  std::vector<double> out(grid.size(), 0.0);
  long double acc = 0.0L;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    acc += gauss_legendre_8(f, grid[i], grid[i + 1]);
    out[i + 1] = static_cast<double>(acc);
  }
  return out;
}

}  // namespace sureid
