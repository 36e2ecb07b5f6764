#include "scatlab/freefield.hpp"

#include <algorithm>
#include <cmath>

#include "scatlab/errors.hpp"

namespace scatlab {

WavePacket::WavePacket(std::variant<RadialGrid, LineGrid> grid, CplxVec psi)
    : grid_(std::move(grid)), psi_(std::move(psi)) {
  const std::size_t n = std::visit([](const auto& g) { return g.size(); }, grid_);
  if (psi_.size() != n) throw InvalidArgument("WavePacket: sample count does not match the grid");
  refresh_norms();
}

WavePacket WavePacket::radial(const RadialGrid& grid, CplxVec psi) {
  return WavePacket(grid, std::move(psi));
}

WavePacket WavePacket::radial(const RadialGrid& grid, const std::function<cplx(double)>& f) {
  CplxVec psi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) psi[i] = f(grid.node(i));
  return WavePacket(grid, std::move(psi));
}

WavePacket WavePacket::line(const LineGrid& grid, CplxVec psi) {
  return WavePacket(grid, std::move(psi));
}

WavePacket WavePacket::line(const LineGrid& grid, const std::function<cplx(double)>& f) {
  CplxVec psi(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) psi[j] = f(grid.node(j));
  return WavePacket(grid, std::move(psi));
}

const RadialGrid& WavePacket::radial_grid() const {
  if (const auto* g = std::get_if<RadialGrid>(&grid_)) return *g;
  throw InvalidArgument("WavePacket: not a radial packet");
}

const LineGrid& WavePacket::line_grid() const {
  if (const auto* g = std::get_if<LineGrid>(&grid_)) return *g;
  throw InvalidArgument("WavePacket: not a line packet");
}

void WavePacket::refresh_norms() {
  l1_ = l2_ = linf_ = 0.0;
  if (const auto* g = std::get_if<RadialGrid>(&grid_)) {
    for (std::size_t i = 0; i < psi_.size(); ++i) {
      const double w = 4.0 * kPi * g->node(i) * g->node(i) * g->weight(i);
      const double a = std::abs(psi_[i]);
      l1_ += a * w;
      l2_ += a * a * w;
      linf_ = std::max(linf_, a);
    }
  } else {
    const double h = std::get<LineGrid>(grid_).spacing();
    for (const cplx& z : psi_) {
      const double a = std::abs(z);
      l1_ += a * h;
      l2_ += a * a * h;
      linf_ = std::max(linf_, a);
    }
  }
  l2_ = std::sqrt(l2_);
}

CplxVec WavePacket::reduced() const {
  const RadialGrid& g = radial_grid();
  CplxVec u(psi_.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = g.node(i) * psi_[i];
  return u;
}

WavePacket WavePacket::from_reduced(const RadialGrid& grid, std::span<const cplx> u) {
  CplxVec psi(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) psi[i] = u[i] / grid.node(i);
  return WavePacket(grid, std::move(psi));
}

FreePropagator::FreePropagator(const RadialGrid& grid)
    : grid_(grid), sine_(std::make_shared<SineTransform>(grid)) {
  k_.resize(grid.size());
  for (std::size_t m = 0; m < k_.size(); ++m) k_[m] = sine_->wavenumber(m);
}

FreePropagator::FreePropagator(const LineGrid& grid)
    : grid_(grid), fft_(std::make_shared<LineFFT>(grid.size())) {
  k_.resize(grid.size());
  for (std::size_t m = 0; m < k_.size(); ++m) k_[m] = fft_frequency(m, grid.size(), grid.spacing());
}

CplxVec FreePropagator::analyse(const WavePacket& f) const {
  if (sine_) {
    if (!(f.radial_grid() == std::get<RadialGrid>(grid_)))
      throw InvalidArgument("FreePropagator: packet grid differs from propagator grid");
    const CplxVec u = f.reduced();
    CplxVec c(u.size());
    sine_->forward(u, c);
    return c;
  }
  if (!(f.line_grid() == std::get<LineGrid>(grid_)))
    throw InvalidArgument("FreePropagator: packet grid differs from propagator grid");
  CplxVec c(f.values().begin(), f.values().end());
  fft_->forward(c);
  return c;
}

WavePacket FreePropagator::synthesise(std::span<const cplx> coeffs) const {
  if (sine_) {
    const RadialGrid& g = std::get<RadialGrid>(grid_);
    CplxVec u(coeffs.size());
    sine_->inverse(coeffs, u);
    return WavePacket::from_reduced(g, u);
  }
  CplxVec x(coeffs.begin(), coeffs.end());
  fft_->backward(x);
  const double inv = 1.0 / static_cast<double>(x.size());
  for (cplx& z : x) z *= inv;
  return WavePacket::line(std::get<LineGrid>(grid_), std::move(x));
}

void FreePropagator::advance(std::span<cplx> coeffs, double t) const {
  for (std::size_t m = 0; m < coeffs.size(); ++m) coeffs[m] *= std::polar(1.0, -k_[m] * k_[m] * t);
}

namespace {

double boundary_fraction(const WavePacket& p) {
  const std::size_t n = p.size();
  const std::size_t edge = std::max<std::size_t>(n / 20, 1);
  double total = 0.0, outer = 0.0;
  if (p.dimension() == Dimension::Radial3D) {
    const RadialGrid& g = p.radial_grid();
    for (std::size_t i = 0; i < n; ++i) {
      const double m = std::norm(p[i]) * g.node(i) * g.node(i);
      total += m;
      if (i + edge >= n) outer += m;
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      const double m = std::norm(p[j]);
      total += m;
      if (j < edge || j + edge >= n) outer += m;
    }
  }
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace

FreeEvolution FreePropagator::propagate(const WavePacket& f, double t) const {
  if (t == 0.0) {
    FreeEvolution out{f, boundary_fraction(f), false};
    out.reflection_flag = out.boundary_mass > kReflectionThreshold;
    return out;
  }
  CplxVec c = analyse(f);
  advance(c, t);
  FreeEvolution out{synthesise(c), 0.0, false};
  out.boundary_mass = boundary_fraction(out.packet);
  out.reflection_flag = out.boundary_mass > kReflectionThreshold;
  return out;
}

FreeEvolution free_propagate(const WavePacket& f, double t) {
  if (f.dimension() == Dimension::Radial3D) return FreePropagator(f.radial_grid()).propagate(f, t);
  return FreePropagator(f.line_grid()).propagate(f, t);
}

cplx resolvent_wavenumber(double lambda, Branch sign, double eps) {
  if (lambda < 0.0 || eps < 0.0) throw InvalidArgument("resolvent: need lambda >= 0 and eps >= 0");
  if (sign == Branch::Plus) return std::sqrt(cplx(lambda * lambda, eps));
  return -std::sqrt(cplx(lambda * lambda, -eps));
}

cplx radial_green(double r, double s, cplx k) {
  const double lo = std::min(r, s), hi = std::max(r, s);
  if (std::abs(k) < 1e-12) return lo;
  return std::sin(k * lo) * std::exp(cplx(0.0, 1.0) * k * hi) / k;
}

cplx free_resolvent_point(double d, cplx k) {
  return std::exp(cplx(0.0, 1.0) * k * d) / (4.0 * kPi * d);
}

namespace {

// Moments of the hat functions on interval j = [s_{j-1}, s_j] (s_0 = 0,
// s_j = r_j) against e^{i k s} and sin(k s) / k. Index j = 0..n-1 stands for
// the interval ending at node j.
struct HatMoments {
  CplxVec left_exp, right_exp;  // \int hat e^{i k s}
  CplxVec left_sin, right_sin;  // \int hat sin(k s) / k (or s at k = 0)
};

HatMoments hat_moments(const RadialGrid& grid, cplx k) {
  const std::size_t n = grid.size();
  HatMoments m;
  m.left_exp.resize(n);
  m.right_exp.resize(n);
  m.left_sin.resize(n);
  m.right_sin.resize(n);
  const cplx I(0.0, 1.0);
  const bool newton = std::abs(k) < 1e-12;
  for (std::size_t j = 0; j < n; ++j) {
    const double s0 = j == 0 ? 0.0 : grid.node(j - 1);
    const double s1 = grid.node(j);
    const double d = s1 - s0;
    if (newton) {
      m.left_exp[j] = m.right_exp[j] = d / 2.0;
      m.left_sin[j] = s0 * d / 2.0 + d * d / 6.0;
      m.right_sin[j] = s0 * d / 2.0 + d * d / 3.0;
      continue;
    }
    // Shifted to [0, d] so that large s0 causes no cancellation.
    const cplx ep = std::exp(I * k * s0), em = std::exp(-I * k * s0);
    const cplx lp = ep * integrate_linear_exp(1.0, -1.0 / d, I * k, 0.0, d);
    const cplx rp = ep * integrate_linear_exp(0.0, 1.0 / d, I * k, 0.0, d);
    const cplx lm = em * integrate_linear_exp(1.0, -1.0 / d, -I * k, 0.0, d);
    const cplx rm = em * integrate_linear_exp(0.0, 1.0 / d, -I * k, 0.0, d);
    m.left_exp[j] = lp;
    m.right_exp[j] = rp;
    m.left_sin[j] = (lp - lm) / (2.0 * I * k);
    m.right_sin[j] = (rp - rm) / (2.0 * I * k);
  }
  return m;
}

// e^{i k r} (or 1) and sin(k r) / k (or r) factors of G(r, s) for s < r and s > r.
struct RowFactors {
  cplx below;  // multiplies \int_0^r sin(ks)/k u
  cplx above;  // multiplies \int_r^R e^{iks} u
};

RowFactors row_factors(double r, cplx k) {
  if (std::abs(k) < 1e-12) return {1.0, r};
  const cplx I(0.0, 1.0);
  return {std::exp(I * k * r), std::sin(k * r) / k};
}

}  // namespace

CplxVec apply_free_resolvent(const RadialGrid& grid, std::span<const cplx> u, cplx k) {
  const std::size_t n = grid.size();
  if (u.size() != n) throw InvalidArgument("apply_free_resolvent: size mismatch");
  const HatMoments m = hat_moments(grid, k);
  // Interval j contributes u_{j-1} (left node, zero for j = 0) and u_j.
  CplxVec inner(n + 1, 0.0), outer(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx left = j == 0 ? cplx(0.0) : u[j - 1];
    inner[j + 1] = inner[j] + m.left_sin[j] * left + m.right_sin[j] * u[j];
  }
  for (std::size_t j = n; j-- > 0;) {
    const cplx left = j == 0 ? cplx(0.0) : u[j - 1];
    outer[j] = outer[j + 1] + m.left_exp[j] * left + m.right_exp[j] * u[j];
  }
  CplxVec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RowFactors f = row_factors(grid.node(i), k);
    // intervals 0..i lie below r_i, intervals i+1..n-1 above
    out[i] = f.below * inner[i + 1] + f.above * outer[i + 1];
  }
  return out;
}

EnergyKernel free_resolvent_kernel(const RadialGrid& grid, double lambda, Branch sign, double eps) {
  EnergyKernel K{grid, lambda, sign, eps, resolvent_wavenumber(lambda, sign, eps), {}};
  const std::size_t n = grid.size();
  const HatMoments m = hat_moments(grid, K.k);
  K.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const RowFactors f = row_factors(grid.node(i), K.k);
    for (std::size_t c = 0; c < n; ++c) {
      // node c is the right end of interval c and the left end of interval c+1
      cplx v = c <= i ? f.below * m.right_sin[c] : f.above * m.right_exp[c];
      if (c + 1 < n) v += c + 1 <= i ? f.below * m.left_sin[c + 1] : f.above * m.left_exp[c + 1];
      K.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return K;
}

Eigen::MatrixXcd EnergyKernel::psi_representation() const {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r[i] = grid.node(static_cast<std::size_t>(i));
  return r.cwiseInverse().asDiagonal() * entries * r.asDiagonal();
}

cplx imaginary_part_constant_exact() { return cplx(0.0, 1.0 / (8.0 * kPi * kPi)); }

IdentityCheck imaginary_part_identity_check(double lambda, const std::function<double(double)>& f,
                                            const RadialGrid& grid, std::optional<cplx> c) {
  const double h = grid.spacing();
  if (!(lambda > 0.0)) throw InvalidArgument("imaginary_part_identity_check: lambda must be > 0");
  if (lambda < 4.0 * kPi / grid.r_max() || lambda * h > 0.5)
    throw InvalidArgument("imaginary_part_identity_check: lambda not resolved by the grid");
  const std::size_t n = grid.size();
  CplxVec u(n);
  RealVec fv(n);
  for (std::size_t i = 0; i < n; ++i) {
    fv[i] = f(grid.node(i));
    u[i] = grid.node(i) * fv[i];
  }
  const CplxVec plus = apply_free_resolvent(grid, u, resolvent_wavenumber(lambda, Branch::Plus, 0.0));
  const CplxVec minus =
      apply_free_resolvent(grid, u, resolvent_wavenumber(lambda, Branch::Minus, 0.0));

  // Phi(m h) = \int_0^{m h} S(d) d dd with S the transform of the measure on lambda S^2.
  const std::size_t cells = 2 * n;
  const GaussRule& g = gauss_legendre(4);
  RealVec dnodes;
  dnodes.reserve(cells * g.x.size());
  for (std::size_t m = 0; m < cells; ++m)
    for (double x : g.x) dnodes.push_back(h * (static_cast<double>(m) + 0.5 * (x + 1.0)));
  const SurfaceMeasure sphere = resolved_measure(3, lambda, h * static_cast<double>(cells));
  const CplxVec S = sigma_hat(sphere, dnodes);
  RealVec Phi(cells + 1, 0.0);
  for (std::size_t m = 0; m < cells; ++m) {
    double acc = 0.0;
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const std::size_t idx = m * g.x.size() + q;
      acc += 0.5 * h * g.w[q] * S[idx].real() * dnodes[idx];
    }
    Phi[m + 1] = Phi[m] + acc;
  }

  IdentityCheck out;
  CplxVec lhs(n), rhs(n);
  double num_re = 0.0, num_im = 0.0, den = 0.0, lhs2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.node(i);
    lhs[i] = (plus[i] - minus[i]) / r;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t hi = i + j + 1, lo = i > j ? i - j : j - i;
      acc += h * fv[j] * grid.node(j) * (Phi[hi] - Phi[lo]);
    }
    rhs[i] = 2.0 * kPi * acc / (lambda * r);
    const double w = 4.0 * kPi * r * r * h;
    num_re += w * rhs[i].real() * lhs[i].real() + w * rhs[i].imag() * lhs[i].imag();
    num_im += w * rhs[i].real() * lhs[i].imag() - w * rhs[i].imag() * lhs[i].real();
    den += w * std::norm(rhs[i]);
    lhs2 += w * std::norm(lhs[i]);
  }
  out.lhs_norm = std::sqrt(lhs2);
  if (den == 0.0 || lhs2 == 0.0) return out;
  out.fitted_constant = cplx(num_re, num_im) / den;
  out.constant = c.value_or(out.fitted_constant);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.node(i);
    res += 4.0 * kPi * r * r * h * std::norm(lhs[i] - out.constant * rhs[i]);
  }
  out.residual = std::sqrt(res / lhs2);
  return out;
}

namespace {

PowerLawFit fit_any(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2) throw InvalidArgument("power-law fit needs at least two samples");
  PowerLawFit fit;
  const double slope = loglog_slope(x, y);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  fit.exponent = -slope;
  fit.prefactor = std::exp(my - slope * mx);
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::log(y[i]) - (my + slope * (std::log(x[i]) - mx));
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / static_cast<double>(x.size()));
  fit.t_min = *std::min_element(x.begin(), x.end());
  fit.t_max = *std::max_element(x.begin(), x.end());
  fit.samples = x.size();
  return fit;
}

// ||R0(lambda^2 + i0) g|| / ||g|| for one member of the family.
double krs_ratio(double lambda, double sigma, double p, std::size_t n_per_unit) {
  const double pd = p / (p - 1.0);
  const double r_max = 10.0 * sigma + 10.0;
  const double h = std::min(1.0 / (static_cast<double>(n_per_unit) * std::max(1.0, lambda)),
                            sigma / 8.0);
  const RadialGrid grid(r_max, static_cast<std::size_t>(std::ceil(r_max / h)));
  const std::size_t n = grid.size();
  CplxVec u(n);
  double gnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.node(i);
    const double env = std::exp(-r * r / (2.0 * sigma * sigma));
    u[i] = env * std::sin(lambda * r);
    gnorm += 4.0 * kPi * r * r * grid.weight(i) * std::pow(std::abs(u[i].real() / r), p);
  }
  const CplxVec v = apply_free_resolvent(grid, u, resolvent_wavenumber(lambda, Branch::Plus, 0.0));
  double onorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.node(i);
    onorm += 4.0 * kPi * r * r * grid.weight(i) * std::pow(std::abs(v[i] / r), pd);
  }
  // Outside the support the output is C e^{i lambda r} / r exactly.
  const double C = std::abs(v[n - 1]);
  const double R = grid.node(n - 1);
  onorm += 4.0 * kPi * std::pow(C, pd) * std::pow(R, 3.0 - pd) / (pd - 3.0);
  return std::pow(onorm, 1.0 / pd) / std::pow(gnorm, 1.0 / p);
}

}  // namespace

PowerLawFit fit_decay_ratios(std::span<const double> lambdas, std::span<const double> ratios) {
  if (lambdas.size() != ratios.size()) throw InvalidArgument("fit_decay_ratios: size mismatch");
  return fit_any(lambdas, ratios);
}

KrsProbe krs_decay_probe(std::span<const double> lambdas, std::span<const double> sigmas,
                         std::size_t n_per_unit) {
  if (sigmas.empty()) throw InvalidArgument("krs_decay_probe: empty test family");
  if (lambdas.size() < 2) throw InvalidArgument("krs_decay_probe: need at least two energies");
  KrsProbe probe;
  probe.p = tomas_exponent(3);
  RealVec ls, rs;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw InvalidArgument("krs_decay_probe: lambda must be > 0");
    KrsSample s{lambda, 0.0, 0.0};
    for (double sigma : sigmas) {
      const double r = krs_ratio(lambda, sigma, probe.p, n_per_unit);
      if (r > s.ratio) {
        s.ratio = r;
        s.best_sigma = sigma;
      }
    }
    probe.samples.push_back(s);
    ls.push_back(lambda);
    rs.push_back(s.ratio);
  }
  probe.fit = fit_any(ls, rs);
  return probe;
}

}  // namespace scatlab
