#include "scatlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "scatlab/errors.hpp"

namespace scatlab {

RadialGrid::RadialGrid(double r_max, std::size_t n) : r_max_(r_max), h_(0.0) {
  if (!(r_max > 0.0) || n < 2) throw InvalidArgument("RadialGrid: need r_max > 0 and n >= 2");
  h_ = r_max / static_cast<double>(n);
  nodes_.resize(n);
  weights_.assign(n, h_);
  for (std::size_t i = 0; i < n; ++i) nodes_[i] = (static_cast<double>(i) + 0.5) * h_;
}

LineGrid::LineGrid(double half_width, std::size_t n) : half_width_(half_width), n_(n), h_(0.0) {
  if (!(half_width > 0.0) || n < 2 || n % 2 != 0)
    throw InvalidArgument("LineGrid: need half_width > 0 and even n >= 2");
  h_ = 2.0 * half_width / static_cast<double>(n);
}

RealVec LineGrid::nodes() const {
  RealVec out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = node(j);
  return out;
}

PowerLawFit fit_power_law(std::span<const double> t, std::span<const double> value, double t_min,
                          double t_max) {
  if (t.size() != value.size()) throw InvalidArgument("fit_power_law: size mismatch");
  RealVec lx, ly;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_min || t[k] > t_max) continue;
    if (!(value[k] > 0.0) || !(t[k] > 0.0))
      throw NumericError("fit_power_law: nonpositive sample " + std::to_string(k) +
                         " (t=" + std::to_string(t[k]) + ", value=" + std::to_string(value[k]) +
                         ")");
    lx.push_back(std::log(t[k]));
    ly.push_back(std::log(value[k]));
  }
  if (lx.size() < 8)
    throw NumericError("fit_power_law: " + std::to_string(lx.size()) +
                       " samples in window, need >= 8");
  const double m = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx <= 0.0) throw NumericError("fit_power_law: degenerate time window");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double e = ly[k] - (intercept + slope * lx[k]);
    ss += e * e;
  }
  PowerLawFit fit;
  fit.exponent = -slope;
  fit.prefactor = std::exp(intercept);
  fit.residual = std::sqrt(ss / m);
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.samples = lx.size();
  return fit;
}

const GaussRule& gauss_legendre(std::size_t order) {
  static std::mutex mu;
  static std::map<std::size_t, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  rule.x.resize(order);
  rule.w.resize(order);
  const std::size_t half = (order + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(order) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(order) * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule.x[i] = -z;
    rule.x[order - 1 - i] = z;
    rule.w[i] = rule.w[order - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

OscillatoryResult oscillatory_integral(const std::function<double(double)>& f, double rate,
                                       double order, const OscillatoryOptions& opts) {
  const double R = opts.truncation_radius;
  if (!(R > 0.0)) throw InvalidArgument("oscillatory_integral: truncation radius must be > 0");
  double panel = opts.max_panel;
  if (rate != 0.0) panel = std::min(panel, 0.25 / std::abs(rate));
  const auto npanel = static_cast<std::size_t>(std::ceil(R / panel));
  panel = R / static_cast<double>(npanel);
  const GaussRule& g = gauss_legendre(8);

  cplx total = 0.0;
  cplx last_quarter = 0.0;
  double amp_max = 0.0, amp_tail = 0.0;
  for (std::size_t p = 0; p < npanel; ++p) {
    const double a = static_cast<double>(p) * panel;
    cplx acc = 0.0;
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      const double s = a + 0.5 * panel * (g.x[k] + 1.0);
      const double amp = f(s) * (order == 0.0 ? 1.0 : std::pow(s, order));
      amp_max = std::max(amp_max, std::abs(amp));
      if (s > 0.9 * R) amp_tail = std::max(amp_tail, std::abs(amp));
      acc += g.w[k] * amp * std::polar(1.0, rate * s);
    }
    acc *= 0.5 * panel;
    total += acc;
    if (a >= 0.75 * R) last_quarter += acc;
  }
  if (amp_max > 0.0 && amp_tail > opts.decay_tolerance * amp_max)
    throw NumericError("oscillatory_integral: amplitude does not decay before the truncation "
                       "radius (tail/max = " +
                       std::to_string(amp_tail / amp_max) + ")");
  // Geometric-tail extrapolation from the last quarter of the range.
  return {total, std::abs(last_quarter)};
}

cplx integrate_linear_exp(cplx a, cplx b, cplx c, double s0, double s1) {
  const double L = s1 - s0;
  const cplx alpha = a + b * s0;
  const cplx shift = std::exp(c * s0);
  const cplx cL = c * L;
  if (std::abs(cL) < 0.5) {
    // Power series of the shifted integral.
    cplx sum = 0.0;
    cplx ck = 1.0;  // c^k / k!
    double Lk1 = L;  // L^(k+1)
    for (int k = 0; k < 30; ++k) {
      const cplx term = ck * (alpha * Lk1 / (k + 1.0) + b * Lk1 * L / (k + 2.0));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      ck *= c / (k + 1.0);
      Lk1 *= L;
    }
    return shift * sum;
  }
  const cplx e = std::exp(cL);
  return shift * (alpha * (e - 1.0) / c + b * (L * e / c - (e - 1.0) / (c * c)));
}

RealVec linspace(double a, double b, std::size_t n) {
  RealVec out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t k = 0; k < n; ++k) out[k] = a + (b - a) * static_cast<double>(k) / (n - 1.0);
  return out;
}

RealVec logspace(double a, double b, std::size_t n) {
  RealVec out = linspace(std::log(a), std::log(b), n);
  for (auto& v : out) v = std::exp(v);
  return out;
}

namespace {
template <class T>
T catmull_rom(std::span<const T> y, double x0, double h, double x, T outside) {
  const double u = (x - x0) / h;
  const auto n = static_cast<long>(y.size());
  if (u < 0.0 || u > static_cast<double>(n - 1)) return outside;
  long k = static_cast<long>(std::floor(u));
  if (k >= n - 1) k = n - 2;
  const double t = u - static_cast<double>(k);
  const T p1 = y[k], p2 = y[k + 1];
  const T p0 = k > 0 ? y[k - 1] : 2.0 * p1 - p2;
  const T p3 = k + 2 < n ? y[k + 2] : 2.0 * p2 - p1;
  const double t2 = t * t, t3 = t2 * t;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}
}  // namespace

double interp_uniform(std::span<const double> y, double x0, double h, double x, double outside) {
  return catmull_rom<double>(y, x0, h, x, outside);
}

cplx interp_uniform(std::span<const cplx> y, double x0, double h, double x, cplx outside) {
  return catmull_rom<cplx>(y, x0, h, x, outside);
}

double integrate(const std::function<double(double)>& f, double a, double b, std::size_t panels,
                 std::size_t order) {
  if (b <= a || panels == 0) return 0.0;
  const GaussRule& g = gauss_legendre(order);
  const double h = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + static_cast<double>(p) * h;
    double acc = 0.0;
    for (std::size_t k = 0; k < g.x.size(); ++k) acc += g.w[k] * f(lo + 0.5 * h * (g.x[k] + 1.0));
    total += 0.5 * h * acc;
  }
  return total;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need >= 2 pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw NumericError("loglog_slope: nonpositive value at index " + std::to_string(i));
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw InvalidArgument("loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

}  // namespace scatlab
