#include "scatlab/wiener.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "scatlab/birman.hpp"
#include "scatlab/errors.hpp"

namespace scatlab {

namespace {

// \int_0^x of the hat function peaking at node j (0-based) of the interpolant
// through (0, 0), (r_1, u_1), ..., (r_n, u_n); the last hat has no right half.
double hat_primitive(std::span<const double> r, std::size_t j, double x) {
  const double a = j == 0 ? 0.0 : r[j - 1];
  const double b = r[j];
  if (x <= a) return 0.0;
  const double up = std::min(x, b);
  double s = (up - a) * (up - a) / (2.0 * (b - a));
  if (x <= b || j + 1 == r.size()) return s;
  const double c = r[j + 1];
  const double dn = std::min(x, c);
  s += ((c - b) * (c - b) - (c - dn) * (c - dn)) / (2.0 * (c - b));
  return s;
}

void require_same(const RhoKernelFamily& s, const RhoKernelFamily& t, const char* who) {
  if (!(s.rho == t.rho) || s.weights.size() != t.weights.size())
    throw InvalidArgument(std::string(who) + ": families live on different grids");
}

}  // namespace

double RhoKernelFamily::kernel_norm(const Eigen::MatrixXcd& a) const {
  if (a.size() == 0) return 0.0;
  double best = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    double c = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) c += std::abs(a(i, j)) * weights[i];
    best = std::max(best, c / weights[j]);
  }
  return best;
}

double RhoKernelFamily::algebra_norm() const {
  const std::size_t d = dim();
  RealVec col(d, 0.0);
  for (const auto& a : samples) {
    if (a.size() == 0) continue;
    for (std::size_t j = 0; j < d; ++j) {
      double c = 0.0;
      for (std::size_t i = 0; i < d; ++i) c += std::abs(a(i, j)) * weights[i];
      col[j] += c / weights[j];
    }
  }
  double best = 0.0;
  for (double c : col) best = std::max(best, c);
  return best * rho.spacing();
}

RhoKernelFamily RhoKernelFamily::zero(const LineGrid& rho, RealVec weights) {
  if (weights.empty()) throw InvalidArgument("RhoKernelFamily: empty weight vector");
  for (double w : weights)
    if (!(w > 0.0)) throw InvalidArgument("RhoKernelFamily: weights must be > 0");
  RhoKernelFamily f;
  f.rho = rho;
  f.weights = std::move(weights);
  f.samples.assign(rho.size(), Eigen::MatrixXcd());
  return f;
}

RhoKernelFamily RhoKernelFamily::spike(const LineGrid& rho, RealVec weights, double rho0,
                                       const Eigen::MatrixXcd& value) {
  RhoKernelFamily f = zero(rho, std::move(weights));
  const auto d = static_cast<Eigen::Index>(f.dim());
  if (value.rows() != d || value.cols() != d)
    throw InvalidArgument("RhoKernelFamily::spike: matrix size does not match the weights");
  const double x = (rho0 + rho.half_width()) / rho.spacing();
  const long m = std::lround(x);
  if (m < 0 || m >= static_cast<long>(rho.size()))
    throw InvalidArgument("RhoKernelFamily::spike: rho0 outside the grid");
  f.samples[static_cast<std::size_t>(m)] = value;
  return f;
}

Eigen::MatrixXcd t_minus_sample(const Potential& V, const RadialGrid& grid, double rho) {
  const std::size_t n = grid.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n));
  if (!(rho > 0.0)) return out;
  const auto r = grid.nodes();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = V(r[i]);
    if (v == 0.0) continue;
    const double lo = std::abs(r[i] - rho);
    const double hi = r[i] + rho;
    for (std::size_t j = 0; j < n; ++j) {
      const double m = hat_primitive(r, j, hi) - hat_primitive(r, j, lo);
      if (m != 0.0)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 0.5 * v * m * r[j] / r[i];
    }
  }
  return out;
}

RhoKernelFamily build_t_minus(const Potential& V, const RadialGrid& grid, const LineGrid& rho) {
  const double reach = 2.0 * grid.r_max() + grid.spacing();
  if (rho.half_width() < reach)
    throw InvalidArgument("build_t_minus: rho grid half width " + std::to_string(rho.half_width()) +
                          " does not cover the interaction range " + std::to_string(reach));
  RealVec w(grid.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = grid.node(i) * grid.node(i);
  RhoKernelFamily f = RhoKernelFamily::zero(rho, std::move(w));
  f.source = V;
  f.radial = grid;
  if (V.is_zero()) return f;
  for (std::size_t m = 0; m < rho.size(); ++m) {
    const double x = rho.node(m);
    if (x > 0.0 && x < reach) f.samples[m] = t_minus_sample(V, grid, x);
  }
  return f;
}

namespace {

// Entry-wise DFT over the rho index, zero padded to `len`:
//   out_k = sum_m T_m e^{-2 pi i k m / len}.
std::vector<Eigen::MatrixXcd> dft(const RhoKernelFamily& t, std::size_t len, int direction,
                                  const std::vector<Eigen::MatrixXcd>* in = nullptr) {
  const std::size_t d = t.dim();
  const std::size_t dd = d * d;
  const auto& src = in ? *in : t.samples;
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * dd * len));
  if (!buf) throw std::bad_alloc();
  std::fill(reinterpret_cast<double*>(buf), reinterpret_cast<double*>(buf) + 2 * dd * len, 0.0);
  for (std::size_t m = 0; m < std::min(len, src.size()); ++m) {
    const auto& a = src[m];
    if (a.size() == 0) continue;
    for (std::size_t e = 0; e < dd; ++e) {
      const cplx z = a(static_cast<Eigen::Index>(e % d), static_cast<Eigen::Index>(e / d));
      buf[e * len + m][0] = z.real();
      buf[e * len + m][1] = z.imag();
    }
  }
  const int n = static_cast<int>(len);
  fftw_plan plan = fftw_plan_many_dft(1, &n, static_cast<int>(dd), buf, nullptr, 1, n, buf, nullptr,
                                      1, n, direction, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  const auto di = static_cast<Eigen::Index>(d);
  std::vector<Eigen::MatrixXcd> out(len, Eigen::MatrixXcd(di, di));
  for (std::size_t k = 0; k < len; ++k)
    for (std::size_t e = 0; e < dd; ++e)
      out[k](static_cast<Eigen::Index>(e % d), static_cast<Eigen::Index>(e / d)) =
          cplx(buf[e * len + k][0], buf[e * len + k][1]);
  fftw_free(buf);
  return out;
}

// Inverse of dft (including the 1/len), returning the first `keep` samples from `offset`.
std::vector<Eigen::MatrixXcd> idft(const RhoKernelFamily& like, const std::vector<Eigen::MatrixXcd>& hat,
                                   std::size_t offset, std::size_t keep) {
  auto full = dft(like, hat.size(), FFTW_BACKWARD, &hat);
  const double scale = 1.0 / static_cast<double>(hat.size());
  std::vector<Eigen::MatrixXcd> out(keep);
  for (std::size_t m = 0; m < keep; ++m) {
    Eigen::MatrixXcd a = full[(offset + m) % hat.size()] * scale;
    if (a.cwiseAbs().maxCoeff() > 0.0) out[m] = std::move(a);
  }
  return out;
}

bool family_is_zero(const RhoKernelFamily& t) {
  return std::all_of(t.samples.begin(), t.samples.end(),
                     [](const Eigen::MatrixXcd& a) { return a.size() == 0; });
}

}  // namespace

RhoKernelFamily convolve(const RhoKernelFamily& s, const RhoKernelFamily& t) {
  require_same(s, t, "convolve");
  RhoKernelFamily out = RhoKernelFamily::zero(s.rho, s.weights);
  if (family_is_zero(s) || family_is_zero(t)) return out;
  const std::size_t n = s.rho.size();
  auto a = dft(s, 2 * n, FFTW_FORWARD);
  const auto b = dft(t, 2 * n, FFTW_FORWARD);
  const double h = s.rho.spacing();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = h * (a[k] * b[k]);
  // rho_a + rho_b = rho_{a + b - n/2}
  out.samples = idft(s, a, s.rho.zero_index(), n);
  return out;
}

RhoKernelFamily add(const RhoKernelFamily& s, const RhoKernelFamily& t, cplx scale) {
  require_same(s, t, "add");
  RhoKernelFamily out = s;
  out.source.reset();
  out.radial = s.radial ? s.radial : t.radial;
  for (std::size_t m = 0; m < out.samples.size(); ++m) {
    const auto& b = t.samples[m];
    if (b.size() == 0) continue;
    if (out.samples[m].size() == 0)
      out.samples[m] = scale * b;
    else
      out.samples[m] += scale * b;
  }
  return out;
}

Eigen::MatrixXcd discrete_symbol(const RhoKernelFamily& t, double lambda) {
  const auto d = static_cast<Eigen::Index>(t.dim());
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t m = 0; m < t.samples.size(); ++m)
    if (t.samples[m].size() != 0)
      acc += std::exp(cplx(0.0, -lambda * t.rho.node(m))) * t.samples[m];
  return acc * t.rho.spacing();
}

namespace {

// Exact rho-integral of e^{-i lambda rho} T^-(rho): T^-(rho) is quadratic in rho
// between consecutive multiples of h/2, so Gauss-Legendre per piece is exact
// up to the exponential, which is resolved by the pi/4 sampling condition.
std::vector<Eigen::MatrixXcd> exact_t_minus_transform(const Potential& V, const RadialGrid& grid,
                                                      std::span<const double> lambdas) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<Eigen::MatrixXcd> acc(lambdas.size(), Eigen::MatrixXcd::Zero(n, n));
  const double piece = 0.5 * grid.spacing();
  const double end = 2.0 * grid.node(grid.size() - 1);
  const auto pieces = static_cast<std::size_t>(std::lround(end / piece));
  const GaussRule& g = gauss_legendre(6);
  for (std::size_t p = 0; p < pieces; ++p) {
    const double a = static_cast<double>(p) * piece;
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const double x = a + 0.5 * piece * (g.x[q] + 1.0);
      const Eigen::MatrixXcd m = t_minus_sample(V, grid, x);
      for (std::size_t k = 0; k < lambdas.size(); ++k)
        acc[k] += (0.5 * piece * g.w[q]) * std::exp(cplx(0.0, -lambdas[k] * x)) * m;
    }
  }
  return acc;
}

}  // namespace

FourierSamples fourier_transform(const RhoKernelFamily& t, std::span<const double> lambdas) {
  const double h = t.rho.spacing();
  double lmax = 0.0;
  for (double l : lambdas) lmax = std::max(lmax, std::abs(l));
  if (h * lmax > kPi / 4.0 + 1e-12)
    throw InvalidArgument("fourier_transform: rho spacing " + std::to_string(h) +
                          " undersamples lambda=" + std::to_string(lmax) + " (need h lambda <= pi/4)");
  FourierSamples out;
  out.lambdas.assign(lambdas.begin(), lambdas.end());
  out.family_norm = t.algebra_norm();
  if (t.source && t.radial) {
    out.exact = true;
    out.values = exact_t_minus_transform(*t.source, *t.radial, lambdas);
  } else {
    for (double l : lambdas) {
      // Filon on the piecewise-linear interpolant: the hat transform is sinc^2.
      const double x = 0.5 * l * h;
      const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
      out.values.push_back(sinc * sinc * discrete_symbol(t, l));
    }
  }
  double sup = 0.0;
  for (const auto& v : out.values) {
    out.norms.push_back(t.kernel_norm(v));
    sup = std::max(sup, out.norms.back());
  }
  out.bound_slack = out.family_norm - sup;
  return out;
}

namespace {

double sigma_min_of(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double signed_lambda(const LineGrid& rho, std::size_t k) {
  const auto n = static_cast<long>(rho.size());
  long s = static_cast<long>(k);
  if (s >= n / 2) s -= n;
  return 2.0 * kPi * static_cast<double>(s) / (static_cast<double>(n) * rho.spacing());
}

// Symbols of the sampled algebra at the DFT nodes lambda_k = 2 pi k / (N h).
// rho_m = -L + m h and L = N h / 2 give the phase (-1)^k.
std::vector<Eigen::MatrixXcd> node_symbols(const RhoKernelFamily& t) {
  auto hat = dft(t, t.rho.size(), FFTW_FORWARD);
  const double h = t.rho.spacing();
  for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= (k % 2 ? -h : h);
  return hat;
}

Eigen::MatrixXcd identity_plus(const RhoKernelFamily& t, const Eigen::MatrixXcd& a) {
  const auto d = static_cast<Eigen::Index>(t.dim());
  return Eigen::MatrixXcd::Identity(d, d) + a;
}

double shift_modulus(const RhoKernelFamily& t, std::size_t shift) {
  const std::size_t d = t.dim();
  const auto n = t.samples.size();
  RealVec col(d, 0.0);
  for (std::size_t m = 0; m < n + shift; ++m) {
    const bool has_a = m < n && t.samples[m].size() != 0;
    const bool has_b = m >= shift && m - shift < n && t.samples[m - shift].size() != 0;
    if (!has_a && !has_b) continue;
    const auto di = static_cast<Eigen::Index>(d);
    Eigen::MatrixXcd diff = Eigen::MatrixXcd::Zero(di, di);
    if (has_a) diff += t.samples[m];
    if (has_b) diff -= t.samples[m - shift];
    for (std::size_t j = 0; j < d; ++j) {
      double c = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        c += std::abs(diff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) * t.weights[i];
      col[j] += c / t.weights[j];
    }
  }
  return *std::max_element(col.begin(), col.end()) * t.rho.spacing();
}

double tail_norm(const RhoKernelFamily& t, double radius) {
  RhoKernelFamily cut = RhoKernelFamily::zero(t.rho, t.weights);
  for (std::size_t m = 0; m < t.samples.size(); ++m)
    if (std::abs(t.rho.node(m)) >= radius) cut.samples[m] = t.samples[m];
  return cut.algebra_norm();
}

WienerDiagnostics diagnostics_with(const RhoKernelFamily& t,
                                   const std::vector<Eigen::MatrixXcd>& symbols) {
  WienerDiagnostics out;
  const double h = t.rho.spacing();
  for (std::size_t k = 1; k <= 32 && k < t.rho.size(); k *= 2) {
    out.deltas.push_back(static_cast<double>(k) * h);
    out.modulus.push_back(shift_modulus(t, k));
  }
  // Rate fitted below saturation (the modulus tends to 2|T| once the shift
  // separates the kernel from itself).
  const double top = out.modulus.empty() ? 0.0 : *std::max_element(out.modulus.begin(), out.modulus.end());
  RealVec xs, ys;
  for (std::size_t i = 0; i < out.deltas.size(); ++i)
    if (out.modulus[i] > 0.0 && out.modulus[i] < 0.9 * top) {
      xs.push_back(out.deltas[i]);
      ys.push_back(out.modulus[i]);
    }
  out.modulus_rate = xs.size() >= 2 ? loglog_slope(xs, ys) : 0.0;
  const double L = t.rho.half_width();
  for (double f : {0.0, 0.125, 0.25, 0.5, 0.75}) {
    out.radii.push_back(f * L);
    out.tail.push_back(tail_norm(t, f * L));
  }
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    out.lambdas.push_back(signed_lambda(t.rho, k));
    out.sigma_min.push_back(sigma_min_of(identity_plus(t, symbols[k])));
  }
  return out;
}

// Golden-section minimum of sigma_min(I + T^(lambda)) on [a, b].
std::pair<double, double> refine_minimum(const RhoKernelFamily& t, double a, double b) {
  auto phi = [&](double l) { return sigma_min_of(identity_plus(t, discrete_symbol(t, l))); };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = phi(x1), f2 = phi(x2);
  for (int it = 0; it < 80 && b - a > 1e-13 * (1.0 + std::abs(a)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = phi(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = phi(x2);
    }
  }
  return f1 < f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// log-log slope of sigma_min(I + R0^- V) at lambda over radial grids n, 2n, 4n.
double refinement_trend(const Potential& V, const RadialGrid& grid, double lambda, double* finest) {
  RealVec ns, s;
  for (std::size_t mult : {1u, 2u, 4u}) {
    const RadialGrid g(grid.r_max(), grid.size() * mult);
    const BirmanSchwinger bs = assemble_bs(V, g, std::abs(lambda), Branch::Minus, 0.0);
    ns.push_back(static_cast<double>(g.size()));
    s.push_back(smallest_singular_value(*bs.lu));
  }
  *finest = s.back();
  return loglog_slope(ns, s);
}

// Locates the smallest singular value of the symbol, refining local minima
// between nodes, and throws NonInvertibleSymbol where it vanishes.
void check_symbol(const RhoKernelFamily& t, const WienerDiagnostics& diag, const WienerOptions& opts,
                  double* sigma, double* where) {
  const auto& s = diag.sigma_min;
  const std::size_t n = s.size();
  std::size_t best = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (s[k] < s[best]) best = k;
  *sigma = s[best];
  *where = diag.lambdas[best];
  if (*sigma <= opts.sigma_floor) throw NonInvertibleSymbol(*where, *sigma);
  const double dl = 2.0 * kPi / (static_cast<double>(n) * t.rho.spacing());
  for (std::size_t k = 0; k < n; ++k) {
    const double prev = s[(k + n - 1) % n], next = s[(k + 1) % n];
    if (!(s[k] <= prev && s[k] <= next && s[k] < opts.refine_level)) continue;
    const auto [l, v] = refine_minimum(t, diag.lambdas[k] - dl, diag.lambdas[k] + dl);
    if (v < *sigma) {
      *sigma = v;
      *where = l;
    }
    if (v <= opts.sigma_floor) throw NonInvertibleSymbol(l, v);
  }
  if (t.source && t.radial && *sigma < opts.refine_level) {
    double finest = 0.0;
    const double slope = refinement_trend(*t.source, *t.radial, *where, &finest);
    if (slope < opts.trend_slope) throw NonInvertibleSymbol(*where, finest);
  }
}

}  // namespace

WienerDiagnostics wiener_diagnostics(const RhoKernelFamily& t) {
  return diagnostics_with(t, node_symbols(t));
}

std::string WienerDiagnostics::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "kind,x,value\n";
  for (std::size_t i = 0; i < deltas.size(); ++i) os << "modulus," << deltas[i] << ',' << modulus[i] << '\n';
  for (std::size_t i = 0; i < radii.size(); ++i) os << "tail," << radii[i] << ',' << tail[i] << '\n';
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    os << "sigma_min," << lambdas[i] << ',' << sigma_min[i] << '\n';
  return os.str();
}

WienerInverse wiener_invert(const RhoKernelFamily& t, const WienerOptions& opts) {
  auto symbols = node_symbols(t);
  WienerInverse out;
  out.diagnostics = diagnostics_with(t, symbols);
  check_symbol(t, out.diagnostics, opts, &out.sigma_min, &out.sigma_min_lambda);

  const double h = t.rho.spacing();
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    Eigen::MatrixXcd a = identity_plus(t, symbols[k]);
    Eigen::MatrixXcd inv = a.partialPivLu().inverse();
    out.max_inverse_norm = std::max(out.max_inverse_norm, t.kernel_norm(inv));
    const auto d = static_cast<Eigen::Index>(t.dim());
    inv -= Eigen::MatrixXcd::Identity(d, d);
    symbols[k] = inv * (k % 2 ? -1.0 / h : 1.0 / h);
  }
  out.s = RhoKernelFamily::zero(t.rho, t.weights);
  out.s.radial = t.radial;
  out.s.samples = idft(t, symbols, 0, t.rho.size());
  out.norm = out.s.algebra_norm();
  if (opts.check_residual) {
    const RhoKernelFamily ts = add(t, out.s);
    out.left_residual = add(ts, convolve(t, out.s)).algebra_norm();
    out.right_residual = add(ts, convolve(out.s, t)).algebra_norm();
  }
  return out;
}

RhoKernelFamily neumann_series(const RhoKernelFamily& t, std::size_t terms) {
  RhoKernelFamily sum = RhoKernelFamily::zero(t.rho, t.weights);
  if (terms == 0) return sum;
  RhoKernelFamily power = t;
  power.source.reset();
  sum = add(sum, power, -1.0);
  for (std::size_t k = 2; k <= terms; ++k) {
    power = convolve(power, t);
    sum = add(sum, power, k % 2 ? -1.0 : 1.0);
  }
  return sum;
}

ScalarWiener scalar_wiener_check(std::span<const cplx> f, const LineGrid& rho,
                                 const WienerOptions& opts) {
  if (f.size() != rho.size()) throw InvalidArgument("scalar_wiener_check: sample count mismatch");
  RhoKernelFamily t = RhoKernelFamily::zero(rho, RealVec{1.0});
  for (std::size_t m = 0; m < f.size(); ++m)
    if (f[m] != 0.0) t.samples[m] = Eigen::MatrixXcd::Constant(1, 1, f[m]);
  const WienerInverse inv = wiener_invert(t, opts);
  ScalarWiener out;
  out.g.assign(rho.size(), 0.0);
  for (std::size_t m = 0; m < rho.size(); ++m)
    if (inv.s.samples[m].size() != 0) out.g[m] = inv.s.samples[m](0, 0);
  out.residual = std::max(inv.left_residual, inv.right_residual);
  out.min_symbol = inv.sigma_min;
  out.min_symbol_lambda = inv.sigma_min_lambda;
  return out;
}

}  // namespace scatlab
