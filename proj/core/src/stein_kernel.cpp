// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#include "sureid/stein_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "sureid/errors.hpp"
#include "sureid/fft.hpp"

namespace sureid {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

// ((x+u)+ - x+)/u, the hinge difference quotient; bounded by 1.
double hinge_dq(double x, double u) {
  return (std::max(x + u, 0.0) - std::max(x, 0.0)) / u;
}

double laplace_h1(double y) {
  // unit-variance Laplace hinge kernel
  return y <= 0.0 ? 0.5 * std::exp(kSqrt2 * y)
                  : 1.0 - 0.5 * std::exp(-kSqrt2 * y);
}

double gamma_h_base(double y, double t) {
  // assembled from t * integral_0^inf e^{-u} (y+u)+ du - t y+ ; pinned
  // against quadrature in the tests
  return y < 0.0 ? t * std::exp(y) : t;
}

NoiseModel centered_copy(const NoiseModel& m) {
  return m.mean() == 0.0 ? m : shift(m, -m.mean());
}

}  // namespace

HingeKernel HingeKernel::normal_form(double variance) {
  HingeKernel k;
  k.kind_ = Kind::normal;
  k.variance_ = variance;
  k.gaussian_var_ = variance;
  return k;
}

HingeKernel HingeKernel::laplace_form(double s) {
  HingeKernel k;
  k.kind_ = Kind::laplace;
  k.variance_ = s * s;
  k.param_ = s;
  return k;
}

HingeKernel HingeKernel::gamma_form(double t, double scale_c) {
  HingeKernel k;
  k.kind_ = Kind::gamma;
  k.variance_ = scale_c * scale_c * t;
  k.param_ = t;
  k.scale_c_ = scale_c;
  return k;
}

HingeKernel HingeKernel::tabulated(const LevyTriple& triple,
                                   const KernelOptions& opts) {
  HingeKernel k;
  k.kind_ = Kind::grid;
  k.gaussian_var_ = triple.gaussian_var;
  k.variance_ = triple.variance();
  k.atoms_ = triple.jumps.atoms();

  const double sigma = std::sqrt(k.variance_);
  const double step = opts.grid_step_sigma * sigma;
  const double half_range = (opts.pad_sigma + opts.lambda_max_sigma) * sigma;
  const int n_half = static_cast<int>(std::ceil(half_range / step));
  k.grid_lo_ = -n_half * step;
  k.grid_step_ = step;
  k.zero_index_ = n_half;

  const auto& comps = triple.jumps.components();
  double density_mass = 0.0;
  double u_max = n_half * step;
  for (const auto& c : comps) {
    density_mass += c.mass();
    u_max = std::max({u_max, std::abs(c.lo()), std::abs(c.hi())});
  }

  const int m_half = static_cast<int>(std::ceil(u_max / step)) + 1;
  const int n_cells = 2 * m_half;
  auto m_total = [&](double u) {
    double s = 0.0;
    for (const auto& c : comps) s += c.density(u);
    return s;
  };
  auto m_over_u = [&](double u) { return m_total(u) / u; };

  // per-cell integrals of the density and of density/u on the u-grid
  std::vector<double> cell_a(n_cells), cell_q(n_cells);
  for (int j = 0; j < n_cells; ++j) {
    const double ua = (j - m_half) * step;
    const double ub = ua + step;
    cell_a[j] = gauss_legendre_8(m_total, ua, ub);
    // the two cells touching the origin are never used through cell_q
    const bool touches_zero = (j - m_half == -1) || (j - m_half == 0);
    cell_q[j] = touches_zero ? 0.0 : gauss_legendre_8(m_over_u, ua, ub);
  }

  // prefix mass A(node), prefix of m/u up to node (for negative nodes),
  // suffix of m/u from node (for positive nodes)
  std::vector<double> prefix_a(n_cells + 1, 0.0), prefix_q(n_cells + 1, 0.0),
      suffix_q(n_cells + 1, 0.0);
  long double acc_a = 0.0L, acc_q = 0.0L;
  for (int j = 0; j < n_cells; ++j) {
    acc_a += cell_a[j];
    acc_q += cell_q[j];
    prefix_a[j + 1] = static_cast<double>(acc_a);
    prefix_q[j + 1] = static_cast<double>(acc_q);
  }
  long double acc_s = 0.0L;
  for (int j = n_cells - 1; j >= 0; --j) {
    acc_s += cell_q[j];
    suffix_q[j] = static_cast<double>(acc_s);
  }

  auto node_index = [m_half](int j) { return j + m_half; };  // u node j*step

  k.values_.assign(2 * n_half + 1, 0.0);
  for (int i = -n_half; i <= n_half; ++i) {
    const double x = i * step;
    double v;
    if (i > 0) {
      const int j = node_index(-i);
      v = density_mass - prefix_a[j] - x * prefix_q[j];
    } else if (i < 0) {
      const int j = node_index(-i);
      v = density_mass - prefix_a[j] + x * suffix_q[j];
    } else {
      v = density_mass - prefix_a[node_index(0)];
    }
    k.values_[i + n_half] = v;
  }
  return k;
}

double HingeKernel::eval_grid(double x) const {
  const int n = static_cast<int>(values_.size());
  const double grid_hi = grid_lo_ + grid_step_ * (n - 1);
  if (x <= grid_lo_) return 0.0;
  if (x >= grid_hi) return variance_;

  const double t = (x - grid_lo_) / grid_step_;
  int cell = std::clamp(static_cast<int>(t), 0, n - 2);

  // 4-point Lagrange cubic; the stencil never crosses the origin node,
  // where the jump part has a kink
  int lo_bound = 0, hi_bound = n - 1;
  if (cell + 1 <= zero_index_)
    hi_bound = zero_index_;
  else
    lo_bound = zero_index_;

  double jump_part;
  if (hi_bound - lo_bound < 3) {
    const double f = t - cell;
    jump_part = values_[cell] * (1.0 - f) + values_[cell + 1] * f;
  } else {
    int j0 = std::clamp(cell - 1, lo_bound, hi_bound - 3);
    const double s = t - j0;
    const double l0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
    const double l1 = s * (s - 2.0) * (s - 3.0) / 2.0;
    const double l2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
    const double l3 = s * (s - 1.0) * (s - 2.0) / 6.0;
    jump_part = l0 * values_[j0] + l1 * values_[j0 + 1] + l2 * values_[j0 + 2] +
                l3 * values_[j0 + 3];
  }

  double v = jump_part + (x >= 0.0 ? gaussian_var_ : 0.0);
  for (const auto& a : atoms_) v += a.mass * hinge_dq(x, a.location);
  return std::clamp(v, 0.0, variance_);
}

double HingeKernel::operator()(double x) const {
  switch (kind_) {
    case Kind::normal:
      return x >= 0.0 ? variance_ : 0.0;
    case Kind::laplace:
      return variance_ * laplace_h1(x / param_);
    case Kind::gamma: {
      const double c = scale_c_;
      if (c > 0.0) return c * c * gamma_h_base(x / c, param_);
      return c * c * (param_ - gamma_h_base(-x / std::abs(c), param_));
    }
    case Kind::grid:
      return eval_grid(x);
  }
  return 0.0;
}

HingeKernel hinge_kernel(const NoiseModel& model, const KernelOptions& opts) {
  if (model.family() == Family::uniform)
    throw unsupported_model_error(
        "hinge_kernel: uniform noise is not infinitely divisible; the risk "
        "module carries its dedicated kernel");
  if (std::abs(model.mean()) > 1e-9 * std::max(1.0, model.sd()))
    throw std::invalid_argument(
        "hinge_kernel: model must be centered; shift by -mean() first");

  switch (model.family()) {
    case Family::normal:
      return HingeKernel::normal_form(model.variance());
    case Family::laplace:
      return HingeKernel::laplace_form(model.laplace_s() *
                                       std::abs(model.scale_factor()));
    case Family::centered_gamma:
      return HingeKernel::gamma_form(model.gamma_t(), model.scale_factor());
    default:
      return HingeKernel::tabulated(levy_view(centered_copy(model)), opts);
  }
}

SteinOperator::SteinOperator(const NoiseModel& model, const KernelOptions& opts)
    : model_(model),
      h_(hinge_kernel(centered_copy(model), opts)),
      drift_(model.mean()),
      variance_(model.variance()) {}

double SteinOperator::apply(const EstimatorExpr& expr, double x) const {
  double s = 0.0;
  for (const auto& [coeff, block] : expr.terms) {
    switch (block.kind) {
      case BuildingBlock::Kind::identity:
        s += coeff * (variance_ + drift_ * x);
        break;
      case BuildingBlock::Kind::constant:
        s += coeff * drift_ * block.value;
        break;
      case BuildingBlock::Kind::hinge_plus: {
        const double y = x - block.value;
        s += coeff * (h_(y) + drift_ * std::max(y, 0.0));
        break;
      }
      case BuildingBlock::Kind::hinge_minus: {
        const double y = x - block.value;
        s += coeff * (variance_ - h_(y) + drift_ * std::min(y, 0.0));
        break;
      }
    }
  }
  return s;
}

double apply_K(const NoiseModel& model, const EstimatorExpr& expr, double x,
               const KernelOptions& opts) {
  return SteinOperator(model, opts).apply(expr, x);
}

KResult levy_K(const NoiseModel& model, const std::function<double(double)>& g,
               double x, std::span<const double> g_kinks,
               const std::function<double(double)>* g_prime,
               const QuadOptions& opts) {
  const LevyTriple t = levy_view(model);

  double gp;
  if (g_prime) {
    gp = (*g_prime)(x);
  } else {
    const double e = 1e-6;
    gp = (g(x + e) - g(x - e)) / (2.0 * e);
  }
  const double gx = g(x);

  double value = t.drift * gx + t.gaussian_var * gp;
  double err = 0.0;
  bool ok = true;

  std::vector<double> bps;
  bps.reserve(g_kinks.size() + 1);
  for (double kk : g_kinks) bps.push_back(kk - x);
  bps.push_back(0.0);

  auto dq = [&](double u) {
    return std::abs(u) < 1e-8 ? gp : (g(x + u) - gx) / u;
  };
  for (const auto& c : t.jumps.components()) {
    auto integrand = [&](double u) { return dq(u) * c.density(u); };
    QuadResult r = integrate_gk_split(integrand, c.lo(), c.hi(), bps, opts);
    value += r.value;
    err += r.error;
    ok = ok && r.converged;
  }
  for (const auto& a : t.jumps.atoms())
    value += a.mass * (g(x + a.location) - gx) / a.location;

  if (!ok)
    throw quadrature_error("levy_K: jump integral did not converge", err);
  return {value, err};
}

double compound_poisson_K(double rate,
                          const std::function<double(double)>& jump_pdf,
                          double lo, double hi,
                          const std::function<double(double)>& g, double x,
                          std::span<const double> g_kinks,
                          const QuadOptions& opts) {
  std::vector<double> bps;
  for (double kk : g_kinks) bps.push_back(kk - x);
  auto integrand = [&](double u) { return rate * jump_pdf(u) * u * g(x + u); };
  QuadResult r = integrate_gk_split(integrand, lo, hi, bps, opts);
  if (!r.converged)
    throw quadrature_error("compound_poisson_K: integral did not converge",
                           r.error);
  return r.value;
}

SpectralResult spectral_K(const NoiseModel& model,
                          const std::function<double(double)>& g,
                          const SpectralGrid& grid) {
  const int n = grid.n;
  if (n < 8 || (n & (n - 1)) != 0)
    throw std::invalid_argument("spectral_K: n must be a power of two >= 8");
  const double half = grid.half_width;
  const double dx = 2.0 * half / n;

  SpectralResult out;
  out.x.resize(n);
  std::vector<std::complex<double>> buf(n);
  double gmax = 0.0, edge_max = 0.0;
  const int margin = n / 10;
  for (int j = 0; j < n; ++j) {
    const double xj = -half + j * dx;
    out.x[j] = xj;
    const double v = g(xj);
    buf[j] = v;
    gmax = std::max(gmax, std::abs(v));
    if (j < margin || j >= n - margin) edge_max = std::max(edge_max, std::abs(v));
  }
  if (gmax == 0.0) {
    out.values.assign(n, 0.0);
    return out;
  }
  if (edge_max > 1e-9 * gmax)
    throw std::invalid_argument(
        "spectral_K: g is supported too close to the grid boundary "
        "(wrap-around contamination)");

  fft_inplace(buf, false);
  const double dw = 2.0 * M_PI / (n * dx);
  for (int k = 0; k < n; ++k) {
    const int kk = (k <= n / 2) ? k : k - n;
    const double w = kk * dw;
    buf[k] *= char_multiplier(model, -w);
  }
  fft_inplace(buf, true);

  out.values.resize(n);
  for (int j = 0; j < n; ++j) out.values[j] = buf[j].real();
  return out;
}

KResult clt_K(const NoiseModel& model, int n,
              const std::function<double(double)>& g, double x,
              const std::function<double(double)>* g_prime,
              const QuadOptions& opts) {
  if (n < 1) throw std::invalid_argument("clt_K: n must be >= 1");
  const LevyTriple t = levy_view(model);
  const double root = std::sqrt(static_cast<double>(n));

  double gp;
  if (g_prime) {
    gp = (*g_prime)(x);
  } else {
    const double e = 1e-6;
    gp = (g(x + e) - g(x - e)) / (2.0 * e);
  }
  const double gx = g(x);

  double value = t.drift * gx + t.gaussian_var * gp;
  double err = 0.0;
  bool ok = true;

  auto dq = [&](double u) {
    const double lag = u / root;
    return std::abs(lag) < 1e-8 ? gp : (g(x + lag) - gx) / lag;
  };
  for (const auto& c : t.jumps.components()) {
    auto integrand = [&](double u) { return dq(u) * c.density(u); };
    const double zero[] = {0.0};
    QuadResult r = integrate_gk_split(integrand, c.lo(), c.hi(), zero, opts);
    value += r.value;
    err += r.error;
    ok = ok && r.converged;
  }
  for (const auto& a : t.jumps.atoms()) {
    const double lag = a.location / root;
    value += a.mass * (g(x + lag) - gx) / lag;
  }

  if (!ok) throw quadrature_error("clt_K: jump integral did not converge", err);
  return {value, err};
}

double TransformRulesReport::max_deviation() const {
  return std::max({translation_dev, drift_dev, convolution_dev, scaling_dev});
}

TransformRulesReport check_transform_rules(const NoiseModel& f1, const NoiseModel& f2,
                              const std::function<double(double)>& g,
                              std::span<const double> g_kinks, double b,
                              double c, std::span<const double> xs,
                              const QuadOptions& opts) {
  if (!(c > 0.0))
    throw std::invalid_argument("check_transform_rules: scaling factor must be > 0");
  TransformRulesReport rep;

  auto g_shifted = [&g, b](double u) { return g(u + b); };
  std::vector<double> kinks_shifted, kinks_scaled;
  for (double kk : g_kinks) {
    kinks_shifted.push_back(kk - b);
    kinks_scaled.push_back(kk / c);
  }
  auto g_scaled = [&g, c](double u) { return g(c * u); };

  const NoiseModel f_drift = shift(f1, b);
  const NoiseModel f_conv = convolve(f1, f2);
  const NoiseModel f_scaled = scale(f1, c);

  for (double x : xs) {
    const double k_base = levy_K(f1, g, x, g_kinks, nullptr, opts).value;

    const double lhs1 = levy_K(f1, g_shifted, x, kinks_shifted, nullptr, opts).value;
    const double rhs1 = levy_K(f1, g, x + b, g_kinks, nullptr, opts).value;
    rep.translation_dev = std::max(rep.translation_dev, std::abs(lhs1 - rhs1));

    const double lhs2 = levy_K(f_drift, g, x, g_kinks, nullptr, opts).value;
    rep.drift_dev = std::max(rep.drift_dev, std::abs(lhs2 - (k_base + b * g(x))));

    const double lhs3 = levy_K(f_conv, g, x, g_kinks, nullptr, opts).value;
    const double rhs3 = k_base + levy_K(f2, g, x, g_kinks, nullptr, opts).value;
    rep.convolution_dev = std::max(rep.convolution_dev, std::abs(lhs3 - rhs3));

    const double lhs4 = levy_K(f_scaled, g, x, g_kinks, nullptr, opts).value;
    const double rhs4 =
        c * levy_K(f1, g_scaled, x / c, kinks_scaled, nullptr, opts).value;
    rep.scaling_dev = std::max(rep.scaling_dev, std::abs(lhs4 - rhs4));
  }
  return rep;
}

double IdentityCheck::gap() const { return std::abs(lhs - rhs); }

IdentityCheck stein_identity_quadrature(const SteinOperator& K,
                                        const EstimatorExpr& g, double theta,
                                        const QuadOptions& opts) {
  auto dv = density(K.model());
  if (!dv)
    throw std::invalid_argument(
        "stein_identity_quadrature: model has no closed-form density");

  std::vector<double> bps;
  for (double kk : g.knots()) bps.push_back(kk - theta);

  IdentityCheck chk;
  chk.lhs = integrate_gk_split(
                [&](double x) { return K.apply(g, x + theta) * dv->pdf(x); },
                dv->lo, dv->hi, bps, opts)
                .value;
  chk.rhs = integrate_gk_split(
                [&](double x) { return x * g(x + theta) * dv->pdf(x); },
                dv->lo, dv->hi, bps, opts)
                .value;
  return chk;
}

}  // namespace sureid
