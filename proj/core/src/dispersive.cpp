#include "scatlab/dispersive.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "scatlab/birman.hpp"
#include "scatlab/errors.hpp"
#include "scatlab/transforms.hpp"

namespace scatlab {

RadialDatum RadialDatum::gaussian(double width, double amplitude) {
  if (!(width > 0.0)) throw InvalidArgument("RadialDatum::gaussian: width must be > 0");
  RadialDatum d;
  std::ostringstream name;
  name << "gaussian(width=" << width << ")";
  d.name = name.str();
  d.psi = [width, amplitude](double r) -> cplx {
    return amplitude * std::exp(-r * r / (2.0 * width * width));
  };
  d.radius = 9.0 * width;
  return d;
}

namespace {

// Wavenumber below which all but 1e-6 of the spectral mass of f lies.
double spectral_quantile(const RadialDatum& f, double h) {
  const double r_max = std::max(4.0 * f.radius, 40.0);
  const auto n = fft_friendly(static_cast<std::size_t>(std::ceil(r_max / h)));
  RadialGrid grid(static_cast<double>(n) * h, n);
  CplxVec u(n), a(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = grid.node(i) * f.psi(grid.node(i));
  SineTransform sine(grid);
  sine.forward(u, a);
  double total = 0.0;
  for (const auto& c : a) total += std::norm(c);
  if (!(total > 0.0)) return 0.0;
  double tail = 0.0;
  for (std::size_t m = n; m-- > 0;) {
    tail += std::norm(a[m]);
    if (tail > 1e-6 * total) return sine.wavenumber(m);
  }
  return sine.wavenumber(0);
}

struct Trace {
  RealVec sup, l2, edge;
  bool horizon_hit = false;
  double worst_edge = 0.0;
};

Trace run_trace(const SplitStepPropagator& prop, CplxVec u, std::span<const double> times,
                double tol) {
  Trace tr;
  const double h = prop.grid().spacing();
  double now = 0.0;
  for (double t : times) {
    prop.evolve(u, t - now);
    now = t;
    tr.sup.push_back(sup_norm_u(u, prop.grid()));
    tr.l2.push_back(l2_norm_u(u, h));
    const double e = prop.boundary_mass(u);
    tr.edge.push_back(e);
    tr.worst_edge = std::max(tr.worst_edge, e);
    if (e > tol) {
      tr.horizon_hit = true;
      return tr;
    }
  }
  return tr;
}

}  // namespace

double sup_norm_u(std::span<const cplx> u, const RadialGrid& grid) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s = std::max(s, std::abs(u[i]) / grid.node(i));
  return s;
}

double l2_norm_u(std::span<const cplx> u, double h) {
  double s = 0.0;
  for (const auto& z : u) s += std::norm(z);
  // |psi|_{L^2(R^3)}^2 = 4 pi \int |u|^2 dr
  return std::sqrt(4.0 * kPi * s * h);
}

CplxVec sample_u(const RadialGrid& grid, const RadialDatum& f) {
  CplxVec u(grid.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = grid.node(i) * f.psi(grid.node(i));
  return u;
}

namespace {
double kinematic_radius(const Potential& V, const RadialDatum& f, double horizon, double spacing,
                        double r_min) {
  // Fastest relevant group velocity 2k; the potential can add up to sqrt(|V|_inf).
  const double k_fast = std::max(spectral_quantile(f, spacing), std::sqrt(V.sup_norm()));
  return std::max({r_min, f.radius + 1.25 * 2.0 * k_fast * horizon, 2.0 * f.radius,
                   V.support_radius()});
}

RadialGrid grid_for(double r_max, double h) {
  const auto n = fft_friendly(static_cast<std::size_t>(std::ceil(r_max / h)));
  return RadialGrid(static_cast<double>(n) * h, n);
}
}  // namespace

RadialGrid kinematic_grid(const Potential& V, const RadialDatum& f, double horizon, double spacing,
                          double r_min) {
  if (!(spacing > 0.0)) throw InvalidArgument("kinematic_grid: spacing must be > 0");
  return grid_for(kinematic_radius(V, f, std::abs(horizon), spacing, r_min), spacing);
}

EvolutionRun evolve(const Potential& V, const RadialDatum& f, std::span<const double> times,
                    const EvolveOptions& opts) {
  if (!f.psi) throw InvalidArgument("evolve: empty initial datum");
  if (!(opts.spacing > 0.0)) throw InvalidArgument("evolve: spacing must be > 0");
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0))
    throw InvalidArgument("evolve: times must be sorted and nonnegative");
  const double h = opts.spacing;
  const double dt = opts.max_dt > 0.0 ? std::min(opts.max_dt, default_time_step(V))
                                      : default_time_step(V);
  const double horizon = times.empty() ? 0.0 : times.back();

  double r_max = kinematic_radius(V, f, horizon, h, opts.r_max);

  EvolutionRun run;
  run.potential = V.name();
  run.datum = f.name;
  run.times.assign(times.begin(), times.end());
  run.dt = dt;
  run.projected = opts.project_bound_states;

  for (int attempt = 0;; ++attempt) {
    const RadialGrid grid = grid_for(r_max, h);
    const std::size_t n = grid.size();
    CplxVec u = sample_u(grid, f);
    const double m0 = l2_norm_u(u, h);
    if (!(m0 > 0.0)) throw InvalidArgument("evolve: initial datum is zero");
    if (opts.project_bound_states) {
      const auto b = bound_states(V, grid);
      project_out(u, b, h);
      run.bound_states_removed = b.energies.size();
      const double m1 = l2_norm_u(u, h);
      run.removed_mass = 1.0 - (m1 * m1) / (m0 * m0);
    }
    SplitStepPropagator prop(V, grid, dt);
    Trace tr = run_trace(prop, u, times, opts.horizon_tolerance);
    if (tr.horizon_hit) {
      if (opts.auto_enlarge && attempt < opts.max_enlargements) {
        r_max *= 1.5;
        continue;
      }
      throw HorizonError("evolve: mass reached r_max=" + std::to_string(grid.r_max()),
                         tr.worst_edge);
    }
    run.sup_norm = std::move(tr.sup);
    run.l2_norm = std::move(tr.l2);
    run.boundary_mass = std::move(tr.edge);
    run.r_max = grid.r_max();
    run.grid_points = n;
    run.enlargements = attempt;
    const double l2_0 = l2_norm_u(u, h);
    for (double v : run.l2_norm)
      run.max_l2_drift = std::max(run.max_l2_drift, std::abs(v - l2_0) / l2_0);

    if (opts.richardson_check) {
      SplitStepPropagator fine(V, grid, 0.5 * dt);
      Trace t2 = run_trace(fine, u, times, 1.0);
      double d = 0.0;
      for (std::size_t k = 0; k < t2.sup.size(); ++k)
        d = std::max(d, std::abs(t2.sup[k] - run.sup_norm[k]) / t2.sup[k]);
      run.richardson_defect = d;
    }
    return run;
  }
}

PowerLawFit fit_decay(EvolutionRun& run, double t_min, double t_max) {
  run.fit = fit_power_law(run.times, run.sup_norm, t_min, t_max);
  return *run.fit;
}

std::string to_string(DecayStatus s) {
  switch (s) {
    case DecayStatus::Confirmed: return "confirmed";
    case DecayStatus::Refuted: return "refuted";
    case DecayStatus::Indeterminate: return "indeterminate";
  }
  return "?";
}

namespace {

nlohmann::ordered_json fit_json(const std::optional<PowerLawFit>& f) {
  if (!f) return nullptr;
  nlohmann::ordered_json j;
  j["exponent"] = f->exponent;
  j["prefactor"] = f->prefactor;
  j["residual"] = f->residual;
  j["t_min"] = f->t_min;
  j["t_max"] = f->t_max;
  j["samples"] = f->samples;
  return j;
}

nlohmann::ordered_json run_json(const EvolutionRun& r) {
  nlohmann::ordered_json j;
  j["potential"] = r.potential;
  j["datum"] = r.datum;
  j["projected"] = r.projected;
  j["bound_states_removed"] = r.bound_states_removed;
  j["removed_mass"] = r.removed_mass;
  j["r_max"] = r.r_max;
  j["grid_points"] = r.grid_points;
  j["dt"] = r.dt;
  j["enlargements"] = r.enlargements;
  j["max_l2_drift"] = r.max_l2_drift;
  j["richardson_defect"] =
      r.richardson_defect ? nlohmann::ordered_json(*r.richardson_defect) : nullptr;
  j["max_boundary_mass"] =
      r.boundary_mass.empty() ? 0.0 : *std::max_element(r.boundary_mass.begin(), r.boundary_mass.end());
  j["fit"] = fit_json(r.fit);
  return j;
}

}  // namespace

std::string EvolutionRun::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "t,sup_norm,l2_norm,boundary_mass\n";
  for (std::size_t k = 0; k < sup_norm.size(); ++k)
    os << times[k] << ',' << sup_norm[k] << ',' << l2_norm[k] << ',' << boundary_mass[k] << '\n';
  return os.str();
}

std::string EvolutionRun::to_json() const { return run_json(*this).dump(2); }

std::string DecayComparison::to_json() const {
  nlohmann::ordered_json j;
  j["status"] = to_string(status);
  j["gap"] = gap;
  j["note"] = note;
  j["regular"] = run_json(regular);
  j["resonant"] = run_json(resonant);
  return j.dump(2);
}

DecayComparison decay_comparison(const Potential& regular, const Potential& resonant,
                                 const RadialDatum& f, const DecayOptions& opts) {
  if (!(opts.sample_step > 0.0) || !(opts.t_max > opts.t_min) || !(opts.t_min > 0.0))
    throw InvalidArgument("decay_comparison: bad time window");
  if (opts.verify_zero_energy) {
    const std::array<std::size_t, 3> levels{256, 512, 1024};
    const auto rr = zero_energy_report(regular, 20.0, levels);
    if (rr.status != ZeroStatus::Regular)
      throw InvalidArgument("decay_comparison: regular potential is not zero-regular (" +
                            to_string(rr.status) + ")");
    const auto rs = zero_energy_report(resonant, 20.0, levels);
    if (rs.status != ZeroStatus::NonRegular)
      throw InvalidArgument("decay_comparison: resonant potential is zero-regular (" +
                            to_string(rs.status) + ")");
  }
  RealVec times;
  for (double t = opts.sample_step; t <= opts.t_max + 1e-9; t += opts.sample_step)
    times.push_back(t);

  EvolveOptions eo = opts.evolve;
  eo.project_bound_states = true;
  DecayComparison out;
  out.regular = evolve(regular, f, times, eo);
  out.resonant = evolve(resonant, f, times, eo);
  const auto a = fit_decay(out.regular, opts.t_min, opts.t_max);
  const auto b = fit_decay(out.resonant, opts.t_min, opts.t_max);
  out.gap = a.exponent - b.exponent;
  if (a.residual > opts.max_fit_residual || b.residual > opts.max_fit_residual) {
    out.status = DecayStatus::Indeterminate;
    out.note = "power-law fit residual above " + std::to_string(opts.max_fit_residual);
  } else if (std::abs(out.gap - opts.gap_target) <= opts.gap_tolerance) {
    out.status = DecayStatus::Confirmed;
  } else {
    out.status = DecayStatus::Refuted;
    out.note = "exponent gap outside tolerance";
  }
  return out;
}

}  // namespace scatlab
