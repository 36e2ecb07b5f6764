#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scatlab/dispersive.hpp"
#include "scatlab/numerics.hpp"
#include "scatlab/potentials.hpp"

namespace scatlab {

// Time quadrature settings shared by the Cook integral and the Dyson terms.
// The regularisation schedule is given at `eps_reference_horizon` and scaled
// like 1/T, so the damping e^{-eps T} at the end of the window is the same for
// every horizon.
struct CookOptions {
  std::vector<double> eps_schedule{0.2, 0.1, 0.05};
  double eps_reference_horizon = 50.0;
  bool scale_eps_with_horizon = true;
  double spacing = 0.1;
  double r_min = 60.0;
  double max_dt = 0.0;  // 0: default_time_step(V)
  std::vector<double> intertwining_times{0.5, 1.0, 2.0};
  bool compute_defects = true;
  // The integrand norm |V e^{-itH0} f|_2 must decay at least like t^-min_tail_exponent.
  double min_tail_exponent = 1.2;
};

struct WaveOperatorResult {
  RadialGrid grid{1.0, 2};
  CplxVec input;       // u = r psi
  CplxVec output;      // eps -> 0 extrapolation of W^eps f
  CplxVec truncated;   // e^{iTH} e^{-iTH0} f (eps = 0, same quadrature)
  std::vector<CplxVec> raw;  // W^eps f per schedule entry
  double horizon = 0.0;
  double dt = 0.0;
  RealVec eps;
  double input_norm = 0.0;
  double tail_estimate = 0.0;  // bound on \int_T^inf |V e^{-itH0} f|_2 dt
  double tail_exponent = 0.0;
  RealVec integrand_times;
  RealVec integrand_norms;
  double isometry_defect = 0.0;      // | |Wf| - |f| |
  double intertwining_defect = 0.0;  // max_s |e^{isH} W f - W e^{isH0} f|
  RealVec intertwining;              // per s
  // Same defects for W^eps at the smallest eps of the schedule. With eps ~ 1/T
  // these are the ones that follow the (T, eps) -> (2T, eps/2) refinement.
  double regularized_isometry_defect = 0.0;
  double regularized_intertwining_defect = 0.0;

  std::string to_json() const;
  std::string to_csv() const;  // r, Re/Im psi of input and output
};

// W_+ f = f + i \int_0^inf e^{itH - eps t} V e^{-itH0} f dt on [0, T], with the
// Strang step as time quadrature (at eps = 0 the sum telescopes to
// e^{iTH} e^{-iTH0} f) and polynomial extrapolation eps -> 0.
WaveOperatorResult cook_wave_operator(const Potential& V, const RadialDatum& f, double T,
                                      const CookOptions& opts = {});

struct DysonResult {
  RadialGrid grid{1.0, 2};
  int order = 1;
  CplxVec term;  // eps -> 0 extrapolation, u = r psi
  std::vector<CplxVec> raw;
  RealVec eps;
  double horizon = 0.0;
  double dt = 0.0;
};

// W_1 f = i \int_0^inf e^{itH0 - eps t} V e^{-itH0} f dt and the next Duhamel
// layer W_2, computed as the first and second order terms in V of the discrete
// Cook sum (same grid, step and eps schedule), so W = I + W_1 + W_2 + O(V^3)
// holds for the discrete operators as well.
DysonResult dyson_term(const Potential& V, const RadialDatum& f, int order, double T,
                       const CookOptions& opts = {});
// Both terms in one sweep.
std::pair<DysonResult, DysonResult> dyson_terms(const Potential& V, const RadialDatum& f, double T,
                                                const CookOptions& opts = {});

// L(r) = kappa \int_0^inf V^(s) e^{irs/2} s ds on a symmetric grid r_j = -R + j step.
struct StructureFunction {
  std::string potential;
  double half_width = 0.0;
  double step = 0.0;
  CplxVec samples;
  cplx kappa{1.0, 0.0};
  double l1 = 0.0;  // |L|_{L^1_{r,omega}} = 4 pi \int |L| dr
  double l2 = 0.0;  // |L|_{L^2_{r,omega}}
  double interpolation_error = 0.0;  // relative, measured at midpoints

  cplx operator()(double r) const;  // kappa included; throws outside the grid
  StructureFunction with_kappa(cplx k) const;
};

struct StructureOptions {
  double half_width = 60.0;
  double step = 0.05;
  double interpolation_tolerance = 1e-4;
  int max_refinements = 3;
};

StructureFunction structure_L(const Potential& V, const StructureOptions& opts = {});

// (W_1 f)(x) = \int_0^inf \int_{S^2} L(r - 2 omega.x) f(x - r omega) dr d omega, for radial f,
// evaluated at the nodes of `grid` with r <= r_eval (zero beyond).
CplxVec apply_w1_structure(const StructureFunction& L, const RadialDatum& f, const RadialGrid& grid,
                           double r_eval);

// Least-squares kappa with kappa * structure ~ reference on nodes r <= r_eval.
cplx calibrate_kappa(std::span<const cplx> structure, std::span<const cplx> reference,
                     const RadialGrid& grid, double r_eval);

// Analytic value of kappa for the Fourier convention f^(xi) = \int f e^{-ix.xi}.
cplx structure_kappa_exact();

// Relative L^2 difference of two radial u-vectors on nodes r <= r_eval.
double relative_l2(std::span<const cplx> a, std::span<const cplx> b, const RadialGrid& grid,
                   double r_eval);

// L^p norm of psi = u / r on R^3 (p = infinity allowed).
double lp_norm_u(std::span<const cplx> u, const RadialGrid& grid, double p);

// Random radial packets a exp(-(r - c)^2 / (2 w^2) + i q r), seeded.
std::vector<RadialDatum> random_packet_family(std::size_t size, unsigned seed);

struct LpProbeRow {
  double p = 0.0;
  double ratio = 0.0;  // max over the family of |Op f|_p / |f|_p
  std::size_t family_size = 0;
};

struct LpProbe {
  std::vector<LpProbeRow> rows;  // one row per (p, family size)
  double stability = 0.0;        // max relative change of the ratio when the family doubles
  std::string to_csv() const;
  std::string to_json() const;
};

// `op` maps a datum to u = r (Op f) on `grid`. Ratios are evaluated for the
// first half of the family and for the whole family.
LpProbe lp_bound_probe(const std::function<CplxVec(const RadialDatum&)>& op,
                       const RadialGrid& grid, std::span<const double> p_list,
                       std::span<const RadialDatum> family);

}  // namespace scatlab
