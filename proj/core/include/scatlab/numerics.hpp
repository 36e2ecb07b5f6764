#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace scatlab {

using cplx = std::complex<double>;
using RealVec = std::vector<double>;
using CplxVec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Cell-centred discretisation of [0, r_max]: r_i = (i - 1/2) h with weight h.
// The nodes are exactly the sample points of the DST-II basis, so the same
// grid serves quadrature and the Dirichlet sine transform.
class RadialGrid {
 public:
  RadialGrid(double r_max, std::size_t n);

  double r_max() const noexcept { return r_max_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double spacing() const noexcept { return h_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  // Same r_max with twice as many points.
  RadialGrid refined() const { return RadialGrid(r_max_, 2 * size()); }

  template <class F>
  RealVec sample(F&& f) const {
    RealVec out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = f(nodes_[i]);
    return out;
  }

  bool operator==(const RadialGrid& o) const noexcept {
    return r_max_ == o.r_max_ && nodes_.size() == o.nodes_.size();
  }

 private:
  double r_max_;
  double h_;
  RealVec nodes_;
  RealVec weights_;
};

// Uniform periodic grid x_j = -half_width + j h, j = 0..n-1, n h = 2 half_width.
class LineGrid {
 public:
  LineGrid(double half_width, std::size_t n);

  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double node(std::size_t j) const noexcept { return -half_width_ + static_cast<double>(j) * h_; }
  // Index of the node x = 0.
  std::size_t zero_index() const noexcept { return n_ / 2; }
  RealVec nodes() const;

  bool operator==(const LineGrid& o) const noexcept {
    return half_width_ == o.half_width_ && n_ == o.n_;
  }

 private:
  double half_width_;
  std::size_t n_;
  double h_;
};

struct PowerLawFit {
  double exponent = 0.0;   // value ~ prefactor * t^(-exponent)
  double prefactor = 0.0;
  double residual = 0.0;   // RMS of the log-log fit
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t samples = 0;
};

// Least squares fit of log(value) against log(t) for samples with t in
// [t_min, t_max]. Needs at least 8 samples in the window, all values > 0.
PowerLawFit fit_power_law(std::span<const double> t, std::span<const double> value, double t_min,
                          double t_max);

struct OscillatoryOptions {
  double truncation_radius = 40.0;
  // Panel length cap; the effective panel is min(max_panel, 1/(4|rate|)).
  double max_panel = 0.5;
  // Amplitude |f(s) s^order| on the last tenth of [0, R] must stay below this
  // fraction of its maximum, otherwise the integral is refused.
  double decay_tolerance = 1e-8;
};

struct OscillatoryResult {
  cplx value;
  double tail_estimate = 0.0;
};

// Integral over [0, R] of f(s) exp(i rate s) s^order on composite 8-point
// Gauss-Legendre panels.
OscillatoryResult oscillatory_integral(const std::function<double(double)>& f, double rate,
                                       double order, const OscillatoryOptions& opts = {});

// Gauss-Legendre nodes/weights on [-1, 1] (cached per order).
struct GaussRule {
  RealVec x;
  RealVec w;
};
const GaussRule& gauss_legendre(std::size_t order);

// Integral of (a + b s) exp(c s) over [s0, s1], stable for small |c|.
cplx integrate_linear_exp(cplx a, cplx b, cplx c, double s0, double s1);

RealVec linspace(double a, double b, std::size_t n);
RealVec logspace(double a, double b, std::size_t n);

// Cubic (Catmull-Rom) interpolation of samples y_k at x0 + k h. Outside the
// sample range returns `outside`.
double interp_uniform(std::span<const double> y, double x0, double h, double x,
                      double outside = 0.0);
cplx interp_uniform(std::span<const cplx> y, double x0, double h, double x, cplx outside = 0.0);

// Composite Gauss-Legendre quadrature of f over [a, b] with `panels` equal panels.
double integrate(const std::function<double(double)>& f, double a, double b, std::size_t panels,
                 std::size_t order = 8);

// Least-squares slope of log(y) against log(x); needs >= 2 positive pairs.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace scatlab
