#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "scatlab/dispersive.hpp"
#include "scatlab/errors.hpp"
#include "scatlab/transforms.hpp"

namespace scatlab {

namespace {

using Path = std::vector<CplxVec>;

class FreeLine {
 public:
  FreeLine(const LineGrid& g, double dt) : fft_(g.size()), phase_(g.size()) {
    const double inv_n = 1.0 / static_cast<double>(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double xi = fft_frequency(k, g.size(), g.spacing());
      phase_[k] = std::polar(inv_n, -xi * xi * dt);
    }
  }
  // v <- e^{i dt d_xx} v
  void step(CplxVec& v) const {
    fft_.forward(v);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= phase_[k];
    fft_.backward(v);
  }

 private:
  LineFFT fft_;
  CplxVec phase_;
};

double l2(const CplxVec& v, double h) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s * h);
}

CplxVec nonlinearity(const CplxVec& v) {
  CplxVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::norm(v[i]);
    out[i] = a * a * v[i];
  }
  return out;
}

// (\int_0^T \int |psi|^6 dx dt)^{1/6}, trapezoid in t.
double l6_norm(const Path& p, double h, double dt) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double row = 0.0;
    for (const auto& z : p[j]) row += std::pow(std::norm(z), 3);
    const double w = (j == 0 || j + 1 == p.size()) ? 0.5 : 1.0;
    s += w * row * h * dt;
  }
  return std::pow(s, 1.0 / 6.0);
}

// One application of the Duhamel map. The integral is accumulated with the
// trapezoid rule in Horner form: D_j = U(dt)[D_{j-1} + dt/2 N_{j-1}] + dt/2 N_j.
Path duhamel(const Path& free, const Path& prev, const FreeLine& U, double dt, double sign) {
  const std::size_t n = free.front().size();
  Path next(free.size());
  next[0] = free[0];
  CplxVec d(n, 0.0);
  CplxVec n_prev = nonlinearity(prev[0]);
  const cplx c(0.0, -sign);
  for (std::size_t j = 1; j < free.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) d[i] += 0.5 * dt * n_prev[i];
    U.step(d);
    CplxVec n_cur = nonlinearity(prev[j]);
    for (std::size_t i = 0; i < n; ++i) d[i] += 0.5 * dt * n_cur[i];
    next[j].resize(n);
    for (std::size_t i = 0; i < n; ++i) next[j][i] = free[j][i] + c * d[i];
    n_prev = std::move(n_cur);
  }
  return next;
}

double path_distance(const Path& a, const Path& b, double h) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a[j].size(); ++i) s += std::norm(a[j][i] - b[j][i]);
    worst = std::max(worst, std::sqrt(s * h));
  }
  return worst;
}

}  // namespace

CplxVec nls_direct(std::span<const cplx> psi0, const LineGrid& grid, NlsSign sign, double horizon,
                   double dt) {
  if (psi0.size() != grid.size()) throw InvalidArgument("nls_direct: size mismatch");
  if (!(dt > 0.0) || !(horizon >= 0.0)) throw InvalidArgument("nls_direct: bad time step");
  CplxVec v(psi0.begin(), psi0.end());
  if (horizon == 0.0) return v;
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-12));
  const double tau = horizon / static_cast<double>(steps);
  const double s = static_cast<double>(static_cast<int>(sign));
  FreeLine U(grid, tau);
  auto kick = [&](double frac) {
    for (auto& z : v) {
      const double a = std::norm(z);
      z *= std::polar(1.0, -s * a * a * tau * frac);
    }
  };
  for (std::size_t k = 0; k < steps; ++k) {
    kick(0.5);
    U.step(v);
    kick(0.5);
  }
  return v;
}

NlsRun nls_small_data(std::span<const cplx> psi0, const LineGrid& grid, NlsSign sign,
                      double horizon, const NlsOptions& opts) {
  if (psi0.size() != grid.size()) throw InvalidArgument("nls_small_data: size mismatch");
  if (!(horizon > 0.0)) throw InvalidArgument("nls_small_data: horizon must be > 0");
  if (!(opts.dt > 0.0)) throw InvalidArgument("nls_small_data: dt must be > 0");
  const double h = grid.spacing();
  CplxVec init(psi0.begin(), psi0.end());
  const double m0 = l2(init, h);
  if (m0 > opts.max_initial_mass * (1.0 + 1e-12))
    throw InvalidArgument("nls_small_data: |psi_0|_2 = " + std::to_string(m0) +
                          " exceeds the small-data bound " + std::to_string(opts.max_initial_mass));
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / opts.dt - 1e-12));
  if (static_cast<double>(steps + 1) * static_cast<double>(grid.size()) > 6e7)
    throw InvalidArgument("nls_small_data: time grid too large to store");
  const double dt = horizon / static_cast<double>(steps);
  const double s = static_cast<double>(static_cast<int>(sign));
  FreeLine U(grid, dt);

  NlsRun run;
  run.sign = sign;
  run.horizon = horizon;
  run.grid = grid;
  run.initial = init;
  for (std::size_t j = 0; j <= steps; ++j) run.times.push_back(dt * static_cast<double>(j));

  Path free(steps + 1);
  free[0] = init;
  for (std::size_t j = 1; j <= steps; ++j) {
    free[j] = free[j - 1];
    U.step(free[j]);
  }
  Path cur = free;
  run.iterate_l6.push_back(l6_norm(cur, h, dt));
  const double floor = 1e-14 * std::max(m0, 1e-300);
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    Path next = duhamel(free, cur, U, dt, s);
    const double d = path_distance(next, cur, h);
    cur = std::move(next);
    run.iterate_l6.push_back(l6_norm(cur, h, dt));
    run.iterate_diffs.push_back(d);
    const std::size_t k = run.iterate_diffs.size();
    if (k >= 2 && run.iterate_diffs[k - 2] > floor && d > floor) {
      const double ratio = d / run.iterate_diffs[k - 2];
      run.contraction = std::max(run.contraction, ratio);
      if (ratio >= 1.0) throw SmallnessViolated(ratio);
    }
    if (d <= opts.tolerance * std::max(m0, 1e-300) || d == 0.0) {
      run.converged = run.contraction <= 0.5;
      break;
    }
  }
  for (const auto& v : cur) run.mass.push_back(std::pow(l2(v, h), 2));
  run.final_state = cur.back();
  const CplxVec direct = nls_direct(init, grid, sign, horizon, dt);
  CplxVec diff(direct.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = direct[i] - run.final_state[i];
  run.direct_difference = l2(diff, h);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = run.final_state[i] - free.back()[i];
  run.nonlinear_effect = l2(diff, h);
  return run;
}

NlsRun nls_small_data(const std::function<cplx(double)>& psi0, NlsSign sign, double horizon,
                      const NlsOptions& opts) {
  LineGrid grid(opts.half_width, opts.points);
  CplxVec v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = psi0(grid.node(j));
  return nls_small_data(v, grid, sign, horizon, opts);
}

std::string NlsRun::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "t,mass\n";
  for (std::size_t j = 0; j < mass.size(); ++j) os << times[j] << ',' << mass[j] << '\n';
  return os.str();
}

std::string NlsRun::to_json() const {
  nlohmann::ordered_json j;
  j["sign"] = sign == NlsSign::Focusing ? "focusing" : "defocusing";
  j["horizon"] = horizon;
  j["grid_points"] = grid.size();
  j["half_width"] = grid.half_width();
  j["iterations"] = iterate_diffs.size();
  j["converged"] = converged;
  j["contraction"] = contraction;
  j["iterate_l6"] = iterate_l6;
  j["iterate_diffs"] = iterate_diffs;
  j["direct_difference"] = direct_difference ? nlohmann::ordered_json(*direct_difference) : nullptr;
  j["nonlinear_effect"] = nonlinear_effect;
  if (!mass.empty()) {
    const auto [lo, hi] = std::minmax_element(mass.begin(), mass.end());
    j["mass_variation"] = *hi - *lo;
  }
  return j.dump(2);
}

}  // namespace scatlab
