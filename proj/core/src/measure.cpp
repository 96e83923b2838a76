// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#include "sureid/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace sureid {

JumpComponent::JumpComponent(std::function<double(double)> density, double lo,
                             double hi, double known_mass)
    : f_(std::move(density)), lo_(lo), hi_(hi), mass_(known_mass) {
  if (!(lo_ < hi_)) throw std::invalid_argument("jump component: empty support");
  if (!(mass_ >= 0.0) || !std::isfinite(mass_))
    throw std::invalid_argument("jump component: mass must be finite and >= 0");
}

JumpComponent::JumpComponent(std::function<double(double)> density, double lo,
                             double hi, const QuadOptions& opts)
    : f_(std::move(density)), lo_(lo), hi_(hi) {
  if (!(lo_ < hi_)) throw std::invalid_argument("jump component: empty support");
  const double zero[] = {0.0};
  QuadResult r = integrate_gk_split(f_, lo_, hi_, zero, opts);
  mass_ = r.value;
  if (!std::isfinite(mass_) || mass_ < 0.0)
    throw std::invalid_argument("jump component: density does not integrate");
}

JumpComponent JumpComponent::scaled(double c) const {
  if (c == 0.0) throw std::invalid_argument("jump component: zero scale");
  auto base = f_;
  const double ac = std::abs(c);
  auto g = [base, c, ac](double u) { return ac * base(u / c); };
  double nlo = std::min(c * lo_, c * hi_);
  double nhi = std::max(c * lo_, c * hi_);
  return JumpComponent(std::move(g), nlo, nhi, c * c * mass_);
}

JumpComponent JumpComponent::weighted(double w) const {
  if (!(w > 0.0)) throw std::invalid_argument("jump component: weight <= 0");
  auto base = f_;
  auto g = [base, w](double u) { return w * base(u); };
  return JumpComponent(std::move(g), lo_, hi_, w * mass_);
}

MeasureSpec::MeasureSpec(std::vector<JumpComponent> components,
                         std::vector<JumpAtom> atoms)
    : components_(std::move(components)), atoms_(std::move(atoms)) {
  double m = 0.0;
  for (const auto& c : components_) m += c.mass();
  for (const auto& a : atoms_) {
    if (a.location == 0.0)
      throw std::invalid_argument("jump measure: atom at the origin");
    if (!(a.mass > 0.0)) throw std::invalid_argument("jump measure: atom mass <= 0");
    m += a.mass;
  }
  if (!std::isfinite(m)) throw std::invalid_argument("jump measure: infinite mass");
  total_mass_ = m;
}

MeasureSpec MeasureSpec::scaled(double c) const {
  std::vector<JumpComponent> comps;
  comps.reserve(components_.size());
  for (const auto& comp : components_) comps.push_back(comp.scaled(c));
  std::vector<JumpAtom> atoms;
  atoms.reserve(atoms_.size());
  for (const auto& a : atoms_) atoms.push_back({c * a.location, c * c * a.mass});
  return MeasureSpec(std::move(comps), std::move(atoms));
}

MeasureSpec MeasureSpec::weighted(double w) const {
  std::vector<JumpComponent> comps;
  comps.reserve(components_.size());
  for (const auto& comp : components_) comps.push_back(comp.weighted(w));
  std::vector<JumpAtom> atoms;
  atoms.reserve(atoms_.size());
  for (const auto& a : atoms_) atoms.push_back({a.location, w * a.mass});
  return MeasureSpec(std::move(comps), std::move(atoms));
}

MeasureSpec MeasureSpec::merged(const MeasureSpec& a, const MeasureSpec& b) {
  std::vector<JumpComponent> comps = a.components_;
  comps.insert(comps.end(), b.components_.begin(), b.components_.end());
  std::vector<JumpAtom> atoms = a.atoms_;
  atoms.insert(atoms.end(), b.atoms_.begin(), b.atoms_.end());
  return MeasureSpec(std::move(comps), std::move(atoms));
}

MeasureSpec MeasureSpec::consolidated(int grid_points) const {
  if (components_.size() <= 1) return *this;
  auto [lo, hi] = support_hull();
  // hull over density components only
  lo = std::numeric_limits<double>::max();
  hi = std::numeric_limits<double>::lowest();
  double density_mass = 0.0;
  for (const auto& c : components_) {
    lo = std::min(lo, c.lo());
    hi = std::max(hi, c.hi());
    density_mass += c.mass();
  }

  const int n = std::max(grid_points, 16);
  const double step = (hi - lo) / (n - 1);
  auto values = std::make_shared<std::vector<double>>(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double u = lo + i * step;
    double s = 0.0;
    for (const auto& c : components_) s += c.density(u);
    (*values)[i] = s;
  }

  auto tab = [values, lo, step, n](double u) {
    const double t = (u - lo) / step;
    if (t <= 0.0) return (*values)[0];
    if (t >= n - 1) return (*values)[n - 1];
    const int i = static_cast<int>(t);
    const double frac = t - i;
    return (*values)[i] * (1.0 - frac) + (*values)[i + 1] * frac;
  };

  // rescale so the tabulated component carries exactly the density mass
  JumpComponent raw(tab, lo, hi, QuadOptions{1e-13, 1e-13, 20000});
  double correction = raw.mass() > 0.0 ? density_mass / raw.mass() : 1.0;
  JumpComponent fixed = raw.weighted(correction);
  return MeasureSpec({std::move(fixed)}, atoms_);
}

double MeasureSpec::integrate(const std::function<double(double)>& fn,
                              const QuadOptions& opts,
                              std::span<const double> breakpoints) const {
  double total = 0.0;
  std::vector<double> pts(breakpoints.begin(), breakpoints.end());
  pts.push_back(0.0);
  for (const auto& c : components_) {
    auto integrand = [&](double u) { return fn(u) * c.density(u); };
    total += integrate_gk_split(integrand, c.lo(), c.hi(), pts, opts).value;
  }
  for (const auto& a : atoms_) total += a.mass * fn(a.location);
  return total;
}

std::complex<double> MeasureSpec::integrate_complex(
    const std::function<std::complex<double>(double)>& fn,
    const QuadOptions& opts) const {
  auto re = integrate([&](double u) { return fn(u).real(); }, opts);
  auto im = integrate([&](double u) { return fn(u).imag(); }, opts);
  return {re, im};
}

std::pair<double, double> MeasureSpec::support_hull() const {
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (const auto& c : components_) {
    lo = std::min(lo, c.lo());
    hi = std::max(hi, c.hi());
  }
  for (const auto& a : atoms_) {
    lo = std::min(lo, a.location);
    hi = std::max(hi, a.location);
  }
  if (lo > hi) return {0.0, 0.0};
  return {lo, hi};
}

}  // namespace sureid
