#include "scatlab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "scatlab/errors.hpp"

namespace scatlab {

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Gaussian: return "gaussian";
    case PotentialKind::Yukawa: return "yukawa";
    case PotentialKind::AubinTalenti: return "aubin_talenti_linearization";
    case PotentialKind::Table: return "table";
    case PotentialKind::Custom: return "custom";
  }
  return "unknown";
}

Potential Potential::gaussian(double amplitude, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("gaussian potential: scale must be > 0");
  Potential p;
  p.kind_ = PotentialKind::Gaussian;
  p.name_ = "gaussian";
  p.amplitude_ = amplitude;
  p.scale_ = scale;
  p.support_radius_ = 7.0 * scale;
  p.sup_norm_ = std::abs(amplitude);
  p.is_zero_ = amplitude == 0.0;
  p.profile_ = [amplitude, scale](double r) { return amplitude * std::exp(-(r / scale) * (r / scale)); };
  p.fourier_ = [amplitude, scale](double xi) {
    return amplitude * std::pow(kPi, 1.5) * scale * scale * scale *
           std::exp(-scale * scale * xi * xi / 4.0);
  };
  return p;
}

Potential Potential::yukawa(double amplitude, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("yukawa potential: scale must be > 0");
  Potential p;
  p.kind_ = PotentialKind::Yukawa;
  p.name_ = "yukawa";
  p.amplitude_ = amplitude;
  p.scale_ = scale;
  p.support_radius_ = 40.0 * scale;
  p.sup_norm_ = std::numeric_limits<double>::infinity();
  p.is_zero_ = amplitude == 0.0;
  p.profile_ = [amplitude, scale](double r) { return amplitude * std::exp(-r / scale) / r; };
  p.fourier_ = [amplitude, scale](double xi) {
    return 4.0 * kPi * amplitude / (xi * xi + 1.0 / (scale * scale));
  };
  return p;
}

double aubin_talenti_w(double r, double lambda_scale) {
  const double x = lambda_scale * r;
  return std::sqrt(lambda_scale) / std::sqrt(1.0 + x * x / 3.0);
}

double aubin_talenti_resonance(double r, double lambda_scale) {
  const double x = lambda_scale * r;
  const double q = 1.0 + x * x / 3.0;
  return (0.5 - x * x / 6.0) / (q * std::sqrt(q));
}

Potential Potential::aubin_talenti(double lambda_scale) {
  if (!(lambda_scale > 0.0)) throw InvalidArgument("aubin_talenti: lambda_scale must be > 0");
  Potential p;
  p.kind_ = PotentialKind::AubinTalenti;
  p.name_ = "aubin_talenti_linearization";
  p.amplitude_ = -5.0;
  p.scale_ = lambda_scale;
  p.support_radius_ = 30.0 / lambda_scale;
  p.decay_power_ = 4.0;
  p.sup_norm_ = 5.0 * lambda_scale * lambda_scale;
  p.profile_ = [lambda_scale](double r) {
    const double w = aubin_talenti_w(r, lambda_scale);
    return -5.0 * w * w * w * w;
  };
  return p;
}

Potential Potential::table(RealVec r, RealVec v) {
  if (r.size() != v.size() || r.size() < 2) throw InvalidArgument("table potential: need >= 2 rows");
  for (std::size_t k = 1; k < r.size(); ++k)
    if (!(r[k] > r[k - 1])) throw InvalidArgument("table potential: r must be strictly increasing");
  Potential p;
  p.kind_ = PotentialKind::Table;
  p.name_ = "table";
  p.support_radius_ = r.back();
  double sup = 0.0, amp = 0.0;
  for (double x : v) {
    if (std::abs(x) > sup) {
      sup = std::abs(x);
      amp = x;
    }
  }
  p.sup_norm_ = sup;
  p.amplitude_ = amp;
  p.is_zero_ = sup == 0.0;
  p.profile_ = [r = std::move(r), v = std::move(v)](double x) {
    if (x <= r.front()) return v.front();
    if (x > r.back()) return 0.0;
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - r.begin());
    const double t = (x - r[k - 1]) / (r[k] - r[k - 1]);
    return (1.0 - t) * v[k - 1] + t * v[k];
  };
  return p;
}

Potential Potential::custom(std::string name, std::function<double(double)> profile,
                            double support_radius, double decay_power, double sup_norm) {
  Potential p;
  p.kind_ = PotentialKind::Custom;
  p.name_ = std::move(name);
  p.support_radius_ = support_radius;
  p.decay_power_ = decay_power;
  p.profile_ = std::move(profile);
  if (sup_norm < 0.0) {
    sup_norm = 0.0;
    for (double r : linspace(1e-6, support_radius, 4001)) sup_norm = std::max(sup_norm, std::abs(p.profile_(r)));
  }
  p.sup_norm_ = sup_norm;
  p.amplitude_ = sup_norm;
  p.is_zero_ = sup_norm == 0.0;
  return p;
}

Potential Potential::load_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("potential CSV: empty input");
  // The header is mandatory and must not parse as numbers.
  {
    std::istringstream hs(line);
    double a;
    char c;
    if (hs >> a >> c) throw InvalidArgument("potential CSV: missing header line");
  }
  RealVec r, v;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a >> b))
      throw InvalidArgument("potential CSV: cannot parse line " + std::to_string(lineno));
    r.push_back(a);
    v.push_back(b);
  }
  return table(std::move(r), std::move(v));
}

Potential Potential::load_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("potential CSV: cannot open " + path);
  return load_csv(in);
}

RealVec Potential::sample(const RadialGrid& grid) const { return grid.sample(profile_); }

double Potential::fourier(double xi) const {
  if (fourier_) return fourier_(xi);
  // Radial Hankel form: 4 pi \int V(r) r sin(xi r) / xi dr.
  OscillatoryOptions opts;
  opts.truncation_radius = decay_power_ > 0.0 ? 20.0 * support_radius_ : support_radius_;
  opts.decay_tolerance = decay_power_ > 0.0 ? 1e-3 : 1e-6;
  if (xi == 0.0) {
    return 4.0 * kPi * integrate([this](double r) { return profile_(r) * r * r; }, 0.0,
                                 opts.truncation_radius, 2000);
  }
  const OscillatoryResult res = oscillatory_integral(profile_, xi, 1.0, opts);
  return 4.0 * kPi * res.value.imag() / xi;
}

Potential Potential::scaled(double c) const {
  Potential p = *this;
  p.amplitude_ *= c;
  p.sup_norm_ *= std::abs(c);
  p.is_zero_ = is_zero_ || c == 0.0;
  p.profile_ = [f = profile_, c](double r) { return c * f(r); };
  if (fourier_) p.fourier_ = [f = fourier_, c](double xi) { return c * f(xi); };
  return p;
}

AubinTalenti aubin_talenti(double lambda_scale, const RadialGrid& grid) {
  AubinTalenti out{Potential::aubin_talenti(lambda_scale), {}};
  out.psi = grid.sample([lambda_scale](double r) { return aubin_talenti_resonance(r, lambda_scale); });
  return out;
}

namespace {

double integration_radius(const Potential& v, const NormOptions& opts) {
  return v.decay_power() > 0.0 ? opts.r_max : std::min(opts.r_max, v.support_radius());
}

// \int_R^inf |V(s)| s^k ds for a power-law tail V ~ s^-p; throws when divergent.
double power_tail(const Potential& v, double R, double k, const char* what) {
  if (v.decay_power() <= 0.0) return 0.0;
  const double p = v.decay_power();
  if (p <= k + 1.0)
    throw NumericError(std::string(what) + ": divergent integral, potential decays like r^-" +
                       std::to_string(p));
  return std::abs(v(R)) * std::pow(R, k + 1.0) / (p - k - 1.0);
}

}  // namespace

KatoNorm kato_norm(const Potential& v, const NormOptions& opts) {
  KatoNorm out;
  if (v.is_zero()) return out;
  const double R = integration_radius(v, opts);
  const std::size_t nc = std::max<std::size_t>(opts.kato_centers, 2);
  const std::size_t sub = 16;  // panels between consecutive centres
  const std::size_t np = nc * sub;
  const double h = R / static_cast<double>(np);
  // cumulative \int_0^{x_k} |V| s^2 and \int_{x_k}^R |V| s
  RealVec inner(np + 1, 0.0), outer(np + 1, 0.0);
  auto f2 = [&v](double s) { return std::abs(v(s)) * s * s; };
  auto f1 = [&v](double s) { return std::abs(v(s)) * s; };
  for (std::size_t k = 0; k < np; ++k) {
    const double a = static_cast<double>(k) * h;
    inner[k + 1] = inner[k] + integrate(f2, a, a + h, 1);
  }
  for (std::size_t k = np; k-- > 0;) {
    const double a = static_cast<double>(k) * h;
    outer[k] = outer[k + 1] + integrate(f1, a, a + h, 1);
  }
  out.tail = 4.0 * kPi * power_tail(v, R, 1.0, "kato_norm");
  for (std::size_t c = 0; c <= nc; ++c) {
    const std::size_t k = c * sub;
    const double a = static_cast<double>(k) * h;
    const double val = 4.0 * kPi * ((a > 0.0 ? inner[k] / a : 0.0) + outer[k]) + out.tail;
    if (val > out.value) {
      out.value = val;
      out.argmax = a;
    }
  }
  return out;
}

DyadicNorm b_beta_norm(const Potential& v, double beta, const NormOptions& opts) {
  if (beta < 0.0) throw InvalidArgument("b_beta_norm: beta must be >= 0");
  DyadicNorm out;
  if (v.is_zero()) return out;
  const double R = integration_radius(v, opts);
  auto shell_l2 = [&v](double a, double b) {
    return std::sqrt(4.0 * kPi *
                     integrate([&v](double s) { return v(s) * v(s) * s * s; }, a, b, 64));
  };
  out.value = shell_l2(0.0, 1.0);
  double prev = 0.0, last = 0.0;
  std::size_t j = 0;
  for (; std::ldexp(1.0, static_cast<int>(j)) < R; ++j) {
    const double a = std::ldexp(1.0, static_cast<int>(j));
    const double term = std::pow(2.0, beta * j) * shell_l2(a, std::min(2.0 * a, R));
    out.value += term;
    prev = last;
    last = term;
  }
  out.shells = j + 1;
  if (v.decay_power() > 0.0 && last > 0.0) {
    const double q = prev > 0.0 ? last / prev : 1.0;
    if (q >= 1.0 || last * q / (1.0 - q) > 0.01 * out.value)
      throw NumericError("b_beta_norm: grid too small to bound the dyadic tail below 1%");
    out.tail = last * q / (1.0 - q);
    out.value += out.tail;
  }
  return out;
}

YStarNorms y_star_norms(const Potential& v, double q, double outer_p, const NormOptions& opts) {
  if (q < 1.0 || outer_p < 1.0) throw InvalidArgument("y_star_norms: need q >= 1, outer_p >= 1");
  YStarNorms out;
  if (v.is_zero()) return out;
  {
    const double a = std::abs(v(1e-12)), b = std::abs(v(1e-6));
    if (!std::isfinite(a) || (b > 0.0 && a > 100.0 * b))
      throw NumericError("y_star_norms: unbounded sup of |V| on the unit ball");
  }
  const double R = v.decay_power() > 0.0 ? opts.r_max : std::max(2.0, std::min(opts.r_max, v.support_radius()));
  auto shell_sup = [&v](double a, double b) {
    double s = 0.0;
    for (double r : linspace(std::max(a, 1e-9), b, 257)) s = std::max(s, std::abs(v(r)));
    return s;
  };
  // D_0 = unit ball, D_j = (2^{j-1}, 2^j] for j >= 1.
  out.y_norm = shell_sup(0.0, 1.0);
  double prev = 0.0, last = out.y_norm;
  std::size_t j = 1;
  for (; std::ldexp(1.0, static_cast<int>(j) - 1) < R; ++j) {
    const double hi = std::ldexp(1.0, static_cast<int>(j));
    const double term = hi * shell_sup(hi / 2.0, hi);
    out.y_norm += term;
    prev = last;
    last = term;
  }
  out.shells = j;
  if (v.decay_power() > 0.0 && last > 0.0) {
    const double ratio = prev > 0.0 ? last / prev : 1.0;
    if (ratio >= 0.999) {
      out.y_converged = false;
      out.y_tail = std::numeric_limits<double>::infinity();
    } else {
      out.y_tail = last * ratio / (1.0 - ratio);
      out.y_norm += out.y_tail;
    }
  }

  // M_q V(a) for radial V: the sphere |z| = s meets the ball |z - x| <= 1/2 in a cap.
  auto mq = [&v, q](double a) {
    const double lo = std::max(0.0, a - 0.5), hi = a + 0.5;
    auto integrand = [&](double s) {
      double frac;  // fraction of the sphere of radius s inside the ball
      if (s + a <= 0.5) {
        frac = 1.0;
      } else {
        const double c0 = (s * s + a * a - 0.25) / (2.0 * s * a);
        frac = 0.5 * (1.0 - std::clamp(c0, -1.0, 1.0));
      }
      return std::pow(std::abs(v(s)), q) * 4.0 * kPi * s * s * frac;
    };
    double total;
    if (a < 0.5) {
      const double kink = 0.5 - a;
      total = integrate(integrand, lo, kink, 4) + integrate(integrand, kink, hi, 8);
    } else {
      total = integrate(integrand, lo, hi, 8);
    }
    return std::pow(total, 1.0 / q);
  };
  const double RM = v.decay_power() > 0.0 ? opts.r_max : R + 1.0;
  const std::size_t panels = std::max<std::size_t>(opts.mq_centers / 8, 8);
  const double acc = integrate(
      [&](double a) { return std::pow(mq(a), outer_p) * 4.0 * kPi * a * a; }, 0.0, RM, panels);
  out.mq_lp = std::pow(acc, 1.0 / outer_p);
  return out;
}

double lp_norm(const Potential& v, double p, const NormOptions& opts) {
  if (v.is_zero()) return 0.0;
  const double R = integration_radius(v, opts);
  const double acc = 4.0 * kPi *
                     integrate([&](double s) { return std::pow(std::abs(v(s)), p) * s * s; }, 0.0,
                               R, 2000);
  return std::pow(acc, 1.0 / p);
}

NormReport norm_report(const Potential& v, double p, double beta, double q, double outer_p,
                       const NormOptions& opts) {
  NormReport rep;
  rep.p = p;
  rep.beta = beta;
  rep.q = q;
  rep.outer_p = outer_p;
  rep.l2 = lp_norm(v, 2.0, opts);
  rep.lp = lp_norm(v, p, opts);
  rep.kato = kato_norm(v, opts).value;
  rep.b_beta = b_beta_norm(v, beta, opts).value;
  const YStarNorms y = y_star_norms(v, q, outer_p, opts);
  rep.y_norm = y.y_norm;
  rep.mq_lp = y.mq_lp;
  return rep;
}

}  // namespace scatlab
