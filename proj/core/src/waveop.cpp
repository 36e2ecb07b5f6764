#include "scatlab/waveop.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <random>
#include <sstream>

#include "scatlab/errors.hpp"
#include "scatlab/transforms.hpp"

namespace scatlab {

namespace {

RealVec scaled_schedule(const CookOptions& o, double T) {
  if (o.eps_schedule.empty()) throw InvalidArgument("waveop: empty eps schedule");
  RealVec eps = o.eps_schedule;
  const double s = o.scale_eps_with_horizon ? o.eps_reference_horizon / T : 1.0;
  for (double& e : eps) {
    if (!(e > 0.0)) throw InvalidArgument("waveop: eps schedule entries must be > 0");
    e *= s;
  }
  for (std::size_t a = 0; a < eps.size(); ++a)
    for (std::size_t b = a + 1; b < eps.size(); ++b)
      if (eps[a] == eps[b]) throw InvalidArgument("waveop: repeated eps in schedule");
  return eps;
}

// Value at eps = 0 of the interpolating polynomial through (eps_k, v_k).
CplxVec extrapolate_zero(const RealVec& eps, const std::vector<CplxVec>& v) {
  CplxVec out(v.front().size(), 0.0);
  for (std::size_t k = 0; k < eps.size(); ++k) {
    double w = 1.0;
    for (std::size_t m = 0; m < eps.size(); ++m)
      if (m != k) w *= eps[m] / (eps[m] - eps[k]);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * v[k][i];
  }
  return out;
}

// Shared set-up: grid, Strang step of length dt, the sine coefficients of f.
struct Sweep {
  RadialGrid grid;
  double dt;
  std::size_t steps;
  SineTransform sine;
  RealVec k2;
  CplxVec a0;

  Sweep(const RadialGrid& g, double T, double max_dt, std::span<const cplx> u0)
      : grid(g),
        dt(0.0),
        steps(static_cast<std::size_t>(std::ceil(T / max_dt - 1e-12))),
        sine(g),
        k2(g.size()),
        a0(g.size()) {
    dt = T / static_cast<double>(steps);
    for (std::size_t m = 0; m < k2.size(); ++m) k2[m] = std::pow(sine.wavenumber(m), 2);
    sine.forward(u0, a0);
  }

  // e^{-i t H0} f in real space.
  CplxVec free_state(double t) const {
    CplxVec c(a0.size()), u(a0.size());
    for (std::size_t m = 0; m < c.size(); ++m) c[m] = a0[m] * std::polar(1.0, -k2[m] * t);
    sine.inverse(c, u);
    return u;
  }
};

struct CookSweep {
  std::vector<CplxVec> per_eps;
  CplxVec truncated;
  RealVec times, norms;
};

// Discrete Cook sum  f + sum_j e^{-eps (t_j + dt/2)} S^{-(j+1)} (F - S) F^j f,
// accumulated backwards so each step costs one inverse Strang step per eps.
CookSweep cook_sweep(const Potential& V, const Sweep& sw, std::span<const cplx> u0,
                     const RealVec& eps, bool with_truncated = true) {
  const std::size_t n = sw.grid.size();
  const double h = sw.grid.spacing();
  SplitStepPropagator prop(V, sw.grid, sw.dt);
  std::vector<CplxVec> acc(eps.size() + (with_truncated ? 1 : 0), CplxVec(n, 0.0));
  CookSweep out;
  const std::size_t stride = std::max<std::size_t>(sw.steps / 400, 1);
  CplxVec next = sw.free_state(sw.dt * static_cast<double>(sw.steps));
  for (std::size_t j = sw.steps; j-- > 0;) {
    const double tj = sw.dt * static_cast<double>(j);
    CplxVec cur = sw.free_state(tj);
    CplxVec d = cur;
    prop.evolve(d, sw.dt);
    for (std::size_t i = 0; i < n; ++i) d[i] = next[i] - d[i];
    if (j % stride == 0 && j > 0) {
      out.times.push_back(tj);
      out.norms.push_back(l2_norm_u(d, h) / sw.dt);
    }
    for (std::size_t k = 0; k < acc.size(); ++k) {
      const double w = k < eps.size() ? std::exp(-eps[k] * (tj + 0.5 * sw.dt)) : 1.0;
      for (std::size_t i = 0; i < n; ++i) acc[k][i] += w * d[i];
      prop.evolve(acc[k], -sw.dt);
    }
    next = std::move(cur);
  }
  for (auto& a : acc)
    for (std::size_t i = 0; i < n; ++i) a[i] += u0[i];
  if (with_truncated) {
    out.truncated = std::move(acc.back());
    acc.pop_back();
  }
  out.per_eps = std::move(acc);
  std::reverse(out.times.begin(), out.times.end());
  std::reverse(out.norms.begin(), out.norms.end());
  return out;
}

struct DysonSweep {
  std::vector<CplxVec> w1, w2;  // per eps, real space
};

// First and second order terms in V of the Cook sum above, at each eps. With
// S = P F P, P = e^{-i dt V/2}, the backward recursion
//   acc_j = S^{-1} (e^{-eps tau_j} X_j + acc_{j+1}),  X_j = (F - S) F^j f,
// expands order by order, so W - I - W_1 - W_2 = O(V^3) holds for the
// discrete operators at every eps and hence after extrapolation.
DysonSweep dyson_sweep(const Potential& V, const Sweep& sw, const RealVec& eps, int max_order) {
  const std::size_t n = sw.grid.size();
  const RealVec v = V.sample(sw.grid);
  const std::size_t ne = eps.size();
  CplxVec fwd(n), back(n);
  for (std::size_t m = 0; m < n; ++m) {
    fwd[m] = std::polar(1.0, -sw.k2[m] * sw.dt);
    back[m] = std::conj(fwd[m]);
  }
  CplxVec hat(n);
  auto apply = [&](const CplxVec& phase, CplxVec& x) {
    sw.sine.forward(x, hat);
    for (std::size_t m = 0; m < n; ++m) hat[m] *= phase[m];
    sw.sine.inverse(hat, x);
  };
  const cplx half(0.0, 0.5 * sw.dt);
  const double quarter = 0.25 * sw.dt * sw.dt;
  std::vector<CplxVec> acc1(ne, CplxVec(n, 0.0)), acc2(ne, CplxVec(n, 0.0));
  CplxVec x1(n), x2(n), fvu(n), tmp(n), z1(n), y(n);
  CplxVec next = sw.free_state(sw.dt * static_cast<double>(sw.steps));
  for (std::size_t j = sw.steps; j-- > 0;) {
    const double tj = sw.dt * static_cast<double>(j);
    const CplxVec u = sw.free_state(tj);
    for (std::size_t i = 0; i < n; ++i) fvu[i] = v[i] * u[i];
    apply(fwd, fvu);
    for (std::size_t i = 0; i < n; ++i) x1[i] = half * (v[i] * next[i] + fvu[i]);
    if (max_order >= 2) {
      for (std::size_t i = 0; i < n; ++i) tmp[i] = 0.5 * v[i] * v[i] * u[i];
      apply(fwd, tmp);
      for (std::size_t i = 0; i < n; ++i)
        x2[i] = quarter * (0.5 * v[i] * v[i] * next[i] + tmp[i] + v[i] * fvu[i]);
    }
    for (std::size_t k = 0; k < ne; ++k) {
      const double e = std::exp(-eps[k] * (tj + 0.5 * sw.dt));
      for (std::size_t i = 0; i < n; ++i) z1[i] = e * x1[i] + acc1[k][i];
      if (max_order >= 2) {
        for (std::size_t i = 0; i < n; ++i) y[i] = e * x2[i] + acc2[k][i] + half * v[i] * z1[i];
        apply(back, y);
      }
      apply(back, z1);
      acc1[k] = z1;
      if (max_order >= 2)
        for (std::size_t i = 0; i < n; ++i) acc2[k][i] = y[i] + half * v[i] * z1[i];
    }
    next = u;
  }
  DysonSweep out;
  out.w1 = std::move(acc1);
  if (max_order >= 2) out.w2 = std::move(acc2);
  return out;
}

double time_step_for(const Potential& V, const CookOptions& o) {
  return o.max_dt > 0.0 ? std::min(o.max_dt, default_time_step(V)) : default_time_step(V);
}

}  // namespace

WaveOperatorResult cook_wave_operator(const Potential& V, const RadialDatum& f, double T,
                                      const CookOptions& opts) {
  if (!(T > 0.0)) throw InvalidArgument("cook_wave_operator: horizon must be > 0");
  if (!f.psi) throw InvalidArgument("cook_wave_operator: empty datum");
  WaveOperatorResult res;
  res.horizon = T;
  res.eps = scaled_schedule(opts, T);
  double s_max = 0.0;
  if (opts.compute_defects)
    for (double s : opts.intertwining_times) s_max = std::max(s_max, std::abs(s));
  res.grid = kinematic_grid(V, f, T + s_max, opts.spacing, opts.r_min);
  const double h = res.grid.spacing();
  res.input = sample_u(res.grid, f);
  res.input_norm = l2_norm_u(res.input, h);
  res.dt = time_step_for(V, opts);

  if (V.is_zero()) {
    res.output = res.truncated = res.input;
    res.raw.assign(res.eps.size(), res.input);
    res.intertwining.assign(opts.compute_defects ? opts.intertwining_times.size() : 0, 0.0);
    return res;
  }

  const Sweep sw(res.grid, T, res.dt, res.input);
  res.dt = sw.dt;
  CookSweep cs = cook_sweep(V, sw, res.input, res.eps);
  res.output = extrapolate_zero(res.eps, cs.per_eps);
  res.truncated = std::move(cs.truncated);
  res.raw = std::move(cs.per_eps);
  res.integrand_times = std::move(cs.times);
  res.integrand_norms = std::move(cs.norms);

  const auto fit = fit_power_law(res.integrand_times, res.integrand_norms, 0.25 * T, T);
  res.tail_exponent = fit.exponent;
  if (fit.exponent < opts.min_tail_exponent)
    throw HorizonError("cook_wave_operator: integrand |V e^{-itH0} f| decays like t^-" +
                           std::to_string(fit.exponent),
                       res.integrand_norms.back());
  res.tail_estimate = res.integrand_norms.back() * T / (fit.exponent - 1.0);

  if (opts.compute_defects) {
    const std::size_t fine =
        static_cast<std::size_t>(std::min_element(res.eps.begin(), res.eps.end()) - res.eps.begin());
    res.isometry_defect = std::abs(l2_norm_u(res.output, h) - res.input_norm);
    res.regularized_isometry_defect = std::abs(l2_norm_u(res.raw[fine], h) - res.input_norm);
    SplitStepPropagator prop(V, res.grid, res.dt);
    auto defect = [&](CplxVec lhs, double s, const CplxVec& rhs) {
      prop.evolve(lhs, -s);  // e^{isH}
      for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] -= rhs[i];
      return l2_norm_u(lhs, h);
    };
    for (double s : opts.intertwining_times) {
      const CplxVec shifted = sw.free_state(-s);
      const Sweep sw2(res.grid, T, res.dt, shifted);
      CookSweep c2 = cook_sweep(V, sw2, shifted, res.eps, false);
      res.intertwining.push_back(defect(res.output, s, extrapolate_zero(res.eps, c2.per_eps)));
      res.regularized_intertwining_defect = std::max(res.regularized_intertwining_defect,
                                                     defect(res.raw[fine], s, c2.per_eps[fine]));
    }
    res.intertwining_defect = *std::max_element(res.intertwining.begin(), res.intertwining.end());
  }
  return res;
}

std::pair<DysonResult, DysonResult> dyson_terms(const Potential& V, const RadialDatum& f, double T,
                                                const CookOptions& opts) {
  if (!(T > 0.0)) throw InvalidArgument("dyson_terms: horizon must be > 0");
  const RealVec eps = scaled_schedule(opts, T);
  const RadialGrid grid = kinematic_grid(V, f, T, opts.spacing, opts.r_min);
  const CplxVec u0 = sample_u(grid, f);
  const Sweep sw(grid, T, time_step_for(V, opts), u0);
  DysonSweep ds = dyson_sweep(V, sw, eps, 2);
  DysonResult a, b;
  for (DysonResult* r : {&a, &b}) {
    r->grid = grid;
    r->eps = eps;
    r->horizon = T;
    r->dt = sw.dt;
  }
  a.order = 1;
  b.order = 2;
  a.term = extrapolate_zero(eps, ds.w1);
  b.term = extrapolate_zero(eps, ds.w2);
  a.raw = std::move(ds.w1);
  b.raw = std::move(ds.w2);
  return {std::move(a), std::move(b)};
}

DysonResult dyson_term(const Potential& V, const RadialDatum& f, int order, double T,
                       const CookOptions& opts) {
  if (order < 1) throw InvalidArgument("dyson_term: order must be >= 1");
  if (order > 2) throw InvalidArgument("dyson_term: orders above 2 are not supported");
  if (order == 2) return dyson_terms(V, f, T, opts).second;
  if (!(T > 0.0)) throw InvalidArgument("dyson_term: horizon must be > 0");
  const RealVec eps = scaled_schedule(opts, T);
  const RadialGrid grid = kinematic_grid(V, f, T, opts.spacing, opts.r_min);
  const CplxVec u0 = sample_u(grid, f);
  const Sweep sw(grid, T, time_step_for(V, opts), u0);
  DysonSweep ds = dyson_sweep(V, sw, eps, 1);
  DysonResult r;
  r.grid = grid;
  r.order = 1;
  r.eps = eps;
  r.horizon = T;
  r.dt = sw.dt;
  r.term = extrapolate_zero(eps, ds.w1);
  r.raw = std::move(ds.w1);
  return r;
}

cplx structure_kappa_exact() { return cplx(0.0, 1.0 / (16.0 * kPi * kPi * kPi)); }

cplx StructureFunction::operator()(double r) const {
  if (r < -half_width || r > half_width)
    throw InvalidArgument("StructureFunction: r=" + std::to_string(r) + " outside the sampled range");
  return kappa * interp_uniform(std::span<const cplx>(samples), -half_width, step, r);
}

StructureFunction StructureFunction::with_kappa(cplx k) const {
  StructureFunction s = *this;
  s.kappa = k;
  return s;
}

namespace {

cplx structure_integral(const Potential& V, double r) {
  OscillatoryOptions o;
  return oscillatory_integral([&V](double s) { return V.fourier(s); }, 0.5 * r, 1.0, o).value;
}

StructureFunction sample_structure(const Potential& V, double half_width, double step) {
  StructureFunction L;
  L.potential = V.name();
  L.step = step;
  const auto half = static_cast<std::size_t>(std::ceil(half_width / step));
  L.half_width = static_cast<double>(half) * step;
  L.samples.assign(2 * half + 1, 0.0);
  if (V.is_zero()) return L;
  // V^ is real, so L(-r) = conj L(r).
  for (std::size_t j = 0; j <= half; ++j) {
    const cplx v = structure_integral(V, static_cast<double>(j) * step);
    L.samples[half + j] = v;
    L.samples[half - j] = std::conj(v);
  }
  return L;
}

}  // namespace

StructureFunction structure_L(const Potential& V, const StructureOptions& opts) {
  if (!(opts.half_width > 0.0) || !(opts.step > 0.0))
    throw InvalidArgument("structure_L: half_width and step must be > 0");
  double step = opts.step;
  for (int level = 0;; ++level) {
    StructureFunction L = sample_structure(V, opts.half_width, step);
    double peak = 0.0;
    for (const auto& z : L.samples) peak = std::max(peak, std::abs(z));
    double err = 0.0;
    if (peak > 0.0) {
      const std::size_t probe = std::max<std::size_t>(L.samples.size() / 64, 1);
      for (std::size_t j = L.samples.size() / 2; j + 1 < L.samples.size(); j += probe) {
        const double r = -L.half_width + (static_cast<double>(j) + 0.5) * L.step;
        err = std::max(err, std::abs(L(r) - structure_integral(V, r)));
      }
      err /= peak;
    }
    L.interpolation_error = err;
    if (err <= opts.interpolation_tolerance || level >= opts.max_refinements) {
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t j = 0; j < L.samples.size(); ++j) {
        const double w = (j == 0 || j + 1 == L.samples.size()) ? 0.5 : 1.0;
        s1 += w * std::abs(L.samples[j]);
        s2 += w * std::norm(L.samples[j]);
      }
      L.l1 = 4.0 * kPi * s1 * L.step;
      L.l2 = std::sqrt(4.0 * kPi * s2 * L.step);
      if (err > opts.interpolation_tolerance)
        throw NumericError("structure_L: interpolation error " + std::to_string(err) +
                           " above tolerance after refinement");
      return L;
    }
    step *= 0.5;
  }
}

CplxVec apply_w1_structure(const StructureFunction& L, const RadialDatum& f, const RadialGrid& grid,
                           double r_eval) {
  if (!f.psi) throw InvalidArgument("apply_w1_structure: empty datum");
  const double rho_max = std::min(r_eval, grid.r_max());
  if (3.0 * rho_max + f.radius > L.half_width)
    throw InvalidArgument("apply_w1_structure: L sampled on [-" + std::to_string(L.half_width) +
                          ", " + std::to_string(L.half_width) + "], need " +
                          std::to_string(3.0 * rho_max + f.radius));
  CplxVec out(grid.size(), 0.0);
  bool zero = true;
  for (const auto& z : L.samples) zero = zero && z == cplx(0.0);
  if (zero) return out;
  const auto& gc = gauss_legendre(48);
  const auto& gr = gauss_legendre(8);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double rho = grid.node(i);
    if (rho > rho_max) break;
    const double r_top = rho + f.radius;
    const auto panels = static_cast<std::size_t>(std::ceil(r_top / 0.25));
    const double pw = r_top / static_cast<double>(panels);
    cplx total = 0.0;
    for (std::size_t a = 0; a < gc.x.size(); ++a) {
      const double c = gc.x[a];
      cplx inner = 0.0;
      for (std::size_t p = 0; p < panels; ++p) {
        const double r0 = pw * static_cast<double>(p);
        for (std::size_t b = 0; b < gr.x.size(); ++b) {
          const double r = r0 + 0.5 * pw * (gr.x[b] + 1.0);
          const double d = std::sqrt(std::max(rho * rho + r * r - 2.0 * rho * r * c, 0.0));
          inner += 0.5 * pw * gr.w[b] * L(r - 2.0 * rho * c) * f.psi(d);
        }
      }
      total += gc.w[a] * inner;
    }
    out[i] = rho * 2.0 * kPi * total;
  }
  return out;
}

cplx calibrate_kappa(std::span<const cplx> structure, std::span<const cplx> reference,
                     const RadialGrid& grid, double r_eval) {
  cplx num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < grid.size() && grid.node(i) <= r_eval; ++i) {
    num += std::conj(structure[i]) * reference[i];
    den += std::norm(structure[i]);
  }
  if (!(den > 0.0)) throw NumericError("calibrate_kappa: structure output vanishes");
  return num / den;
}

double relative_l2(std::span<const cplx> a, std::span<const cplx> b, const RadialGrid& grid,
                   double r_eval) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < grid.size() && grid.node(i) <= r_eval; ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  if (!(den > 0.0)) return num > 0.0 ? INFINITY : 0.0;
  return std::sqrt(num / den);
}

double lp_norm_u(std::span<const cplx> u, const RadialGrid& grid, double p) {
  if (std::isinf(p)) return sup_norm_u(u, grid);
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm_u: p must be >= 1");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = grid.node(i);
    s += std::pow(std::abs(u[i]) / r, p) * r * r;
  }
  return std::pow(4.0 * kPi * s * grid.spacing(), 1.0 / p);
}

std::vector<RadialDatum> random_packet_family(std::size_t size, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> centre(0.0, 3.0), width(0.6, 1.5), freq(0.0, 1.5),
      amp(0.5, 2.0);
  std::vector<RadialDatum> out;
  for (std::size_t k = 0; k < size; ++k) {
    const double c = centre(gen), w = width(gen), q = freq(gen), a = amp(gen);
    RadialDatum d;
    std::ostringstream name;
    name << "packet(c=" << c << ",w=" << w << ",q=" << q << ",a=" << a << ")";
    d.name = name.str();
    d.psi = [=](double r) -> cplx {
      return a * std::exp(-(r - c) * (r - c) / (2.0 * w * w)) * std::polar(1.0, q * r);
    };
    d.radius = c + 9.0 * w;
    out.push_back(std::move(d));
  }
  return out;
}

LpProbe lp_bound_probe(const std::function<CplxVec(const RadialDatum&)>& op,
                       const RadialGrid& grid, std::span<const double> p_list,
                       std::span<const RadialDatum> family) {
  if (family.size() < 2) throw InvalidArgument("lp_bound_probe: family needs >= 2 members");
  std::vector<RealVec> ratios(p_list.size());
  for (const auto& f : family) {
    const CplxVec in = sample_u(grid, f);
    const CplxVec out = op(f);
    if (out.size() != grid.size()) throw InvalidArgument("lp_bound_probe: operator output size");
    for (std::size_t a = 0; a < p_list.size(); ++a)
      ratios[a].push_back(lp_norm_u(out, grid, p_list[a]) / lp_norm_u(in, grid, p_list[a]));
  }
  LpProbe probe;
  const std::size_t half = family.size() / 2;
  for (std::size_t a = 0; a < p_list.size(); ++a) {
    const double r_half = *std::max_element(ratios[a].begin(), ratios[a].begin() + half);
    const double r_full = *std::max_element(ratios[a].begin(), ratios[a].end());
    probe.rows.push_back({p_list[a], r_half, half});
    probe.rows.push_back({p_list[a], r_full, family.size()});
    probe.stability = std::max(probe.stability, std::abs(r_full - r_half) / r_half);
  }
  return probe;
}

namespace {
std::string p_label(double p) { return std::isinf(p) ? "inf" : std::to_string(p); }
}  // namespace

std::string LpProbe::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "p,ratio,family_size\n";
  for (const auto& r : rows) os << p_label(r.p) << ',' << r.ratio << ',' << r.family_size << '\n';
  return os.str();
}

std::string LpProbe::to_json() const {
  nlohmann::ordered_json j;
  auto& arr = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    arr.push_back({{"p", p_label(r.p)}, {"ratio", r.ratio}, {"family_size", r.family_size}});
  j["stability"] = stability;
  return j.dump(2);
}

std::string WaveOperatorResult::to_json() const {
  nlohmann::ordered_json j;
  j["horizon"] = horizon;
  j["dt"] = dt;
  j["eps"] = eps;
  j["r_max"] = grid.r_max();
  j["grid_points"] = grid.size();
  j["input_norm"] = input_norm;
  j["output_norm"] = l2_norm_u(output, grid.spacing());
  j["tail_exponent"] = tail_exponent;
  j["tail_estimate"] = tail_estimate;
  j["isometry_defect"] = isometry_defect;
  j["intertwining_defect"] = intertwining_defect;
  j["intertwining"] = intertwining;
  j["regularized_isometry_defect"] = regularized_isometry_defect;
  j["regularized_intertwining_defect"] = regularized_intertwining_defect;
  return j.dump(2);
}

std::string WaveOperatorResult::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "r,re_f,im_f,re_wf,im_wf\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.node(i);
    os << r << ',' << input[i].real() / r << ',' << input[i].imag() / r << ','
       << output[i].real() / r << ',' << output[i].imag() / r << '\n';
  }
  return os.str();
}

}  // namespace scatlab
