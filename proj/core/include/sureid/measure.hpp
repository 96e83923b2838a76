// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "sureid/quadrature.hpp"

namespace sureid {

/// Point mass of a jump measure; never located at the origin (the Gaussian
/// part of a law is carried separately).
struct JumpAtom {
  double location = 0.0;
  double mass = 0.0;
};

/// One absolutely continuous piece of a jump measure: a density on a
/// truncated support [lo, hi] with its total mass cached.
class JumpComponent {
 public:
  JumpComponent(std::function<double(double)> density, double lo, double hi,
                double known_mass);
  // mass computed by quadrature
  JumpComponent(std::function<double(double)> density, double lo, double hi,
                const QuadOptions& opts = {});

  double density(double u) const { return u < lo_ || u > hi_ ? 0.0 : f_(u); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mass() const { return mass_; }

  JumpComponent scaled(double c) const;    // pushforward of u -> c*u, mass * c^2
  JumpComponent weighted(double w) const;  // mass multiplied by w > 0

 private:
  std::function<double(double)> f_;
  double lo_, hi_, mass_;
};

/// A finite positive measure on the real line minus the origin, stored as a
/// list of density components plus point masses. Immutable after
/// construction; operations return new values.
class MeasureSpec {
 public:
  MeasureSpec() = default;
  MeasureSpec(std::vector<JumpComponent> components,
              std::vector<JumpAtom> atoms = {});

  const std::vector<JumpComponent>& components() const { return components_; }
  const std::vector<JumpAtom>& atoms() const { return atoms_; }
  bool empty() const { return components_.empty() && atoms_.empty(); }

  double total_mass() const { return total_mass_; }

  /// Pushforward under u -> c*u with the canonical mass multiplier c^2.
  MeasureSpec scaled(double c) const;
  /// All masses multiplied by w > 0.
  MeasureSpec weighted(double w) const;
  /// Measure addition (convolution of the underlying laws).
  static MeasureSpec merged(const MeasureSpec& a, const MeasureSpec& b);

  /// Collapses all density components into a single tabulated density on a
  /// uniform grid (atoms are kept). The tabulated density is rescaled so
  /// the total mass is preserved exactly.
  MeasureSpec consolidated(int grid_points = 8192) const;

  /// integral of fn against the measure; breakpoints are integrand kinks.
  double integrate(const std::function<double(double)>& fn,
                   const QuadOptions& opts = {},
                   std::span<const double> breakpoints = {}) const;
  std::complex<double> integrate_complex(
      const std::function<std::complex<double>(double)>& fn,
      const QuadOptions& opts = {}) const;

  /// Smallest interval [lo, hi] containing every component support and atom.
  std::pair<double, double> support_hull() const;

 private:
  std::vector<JumpComponent> components_;
  std::vector<JumpAtom> atoms_;
  double total_mass_ = 0.0;
};

}  // namespace sureid
