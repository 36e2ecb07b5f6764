#pragma once

#include <functional>
#include <optional>
#include <string>

#include "scatlab/numerics.hpp"
#include "scatlab/potentials.hpp"
#include "scatlab/propagator.hpp"

namespace scatlab {

// Radial initial datum psi(r), kept as a function so it can be resampled when
// the box is enlarged.
struct RadialDatum {
  std::string name;
  std::function<cplx(double)> psi;
  double radius = 10.0;  // |psi| negligible beyond this

  static RadialDatum gaussian(double width, double amplitude = 1.0);
};

// Grid with the given spacing on a box large enough that f, evolved with H for
// |t| <= horizon, keeps away from r_max: r_max >= 2.5 k_fast horizon, with k_fast
// the 1e-6 spectral quantile of f or sqrt(|V|_inf).
RadialGrid kinematic_grid(const Potential& V, const RadialDatum& f, double horizon, double spacing,
                          double r_min = 60.0);
CplxVec sample_u(const RadialGrid& grid, const RadialDatum& f);
// |psi|_{L^2(R^3)} for psi = u / r.
double l2_norm_u(std::span<const cplx> u, double h);
double sup_norm_u(std::span<const cplx> u, const RadialGrid& grid);

struct EvolveOptions {
  double r_max = 60.0;  // starting box; grown to the kinematic estimate
  double spacing = 0.1;
  double max_dt = 0.0;  // 0: default_time_step(V)
  bool project_bound_states = true;
  double horizon_tolerance = 1e-4;
  bool auto_enlarge = true;
  int max_enlargements = 4;
  bool richardson_check = false;
};

// Samples of e^{-itH} f. Sup norms are of psi = u / r.
struct EvolutionRun {
  std::string potential;
  std::string datum;
  RealVec times;
  RealVec sup_norm;
  RealVec l2_norm;
  RealVec boundary_mass;
  bool projected = false;
  std::size_t bound_states_removed = 0;
  double removed_mass = 0.0;  // |P_b f|^2 / |f|^2
  double r_max = 0.0;
  std::size_t grid_points = 0;
  double dt = 0.0;
  int enlargements = 0;
  double max_l2_drift = 0.0;
  std::optional<double> richardson_defect;  // max relative sup change at dt/2
  std::optional<PowerLawFit> fit;

  std::string to_csv() const;
  std::string to_json() const;
};

EvolutionRun evolve(const Potential& V, const RadialDatum& f, std::span<const double> times,
                    const EvolveOptions& opts = {});

// Fits the sup norm over [t_min, t_max]; stores and returns it.
PowerLawFit fit_decay(EvolutionRun& run, double t_min = 5.0, double t_max = 50.0);

enum class DecayStatus { Confirmed, Refuted, Indeterminate };
std::string to_string(DecayStatus s);

struct DecayComparison {
  EvolutionRun regular;
  EvolutionRun resonant;
  double gap = 0.0;  // regular minus resonant exponent
  DecayStatus status = DecayStatus::Indeterminate;
  std::string note;
  std::string to_json() const;
};

struct DecayOptions {
  EvolveOptions evolve;
  double t_min = 5.0;
  double t_max = 50.0;
  double sample_step = 0.5;
  double max_fit_residual = 0.2;
  double gap_target = 1.0;
  double gap_tolerance = 0.3;
  // Run zero_energy_report on both potentials and insist on the dichotomy.
  bool verify_zero_energy = true;
};

DecayComparison decay_comparison(const Potential& regular, const Potential& resonant,
                                 const RadialDatum& f, const DecayOptions& opts = {});

// Small-data critical NLS in one dimension:
//   i psi_t + psi_xx = sign |psi|^4 psi   (sign +1 defocusing, -1 focusing)
// solved as the fixed point of the Duhamel map.
enum class NlsSign { Focusing = -1, Defocusing = 1 };

struct NlsOptions {
  double half_width = 40.0;
  std::size_t points = 1024;
  double dt = 0.01;
  std::size_t max_iterations = 40;
  double tolerance = 1e-12;  // on successive iterate differences, relative sup over time of L2
  double max_initial_mass = 0.1;  // bound on |psi_0|_2
};

struct NlsRun {
  NlsSign sign = NlsSign::Defocusing;
  double horizon = 0.0;
  LineGrid grid{1.0, 2};
  CplxVec initial;
  RealVec times;
  std::vector<double> iterate_l6;     // L^6_{t,x} norm of each Picard iterate
  std::vector<double> iterate_diffs;  // sup_t |psi_{k+1} - psi_k|_2
  double contraction = 0.0;           // worst ratio of consecutive differences
  RealVec mass;                       // |psi(t)|_2^2 along the fixed point
  CplxVec final_state;
  std::optional<double> direct_difference;  // |Duhamel - direct split-step|_2 at the horizon
  double nonlinear_effect = 0.0;            // |psi(T) - e^{iT d_xx} psi_0|_2
  bool converged = false;

  double l6_norm() const { return iterate_l6.empty() ? 0.0 : iterate_l6.back(); }
  std::string to_csv() const;
  std::string to_json() const;
};

NlsRun nls_small_data(std::span<const cplx> psi0, const LineGrid& grid, NlsSign sign,
                      double horizon, const NlsOptions& opts = {});
NlsRun nls_small_data(const std::function<cplx(double)>& psi0, NlsSign sign, double horizon,
                      const NlsOptions& opts = {});

// Direct Strang solve of the same equation (potential step = nonlinear phase).
CplxVec nls_direct(std::span<const cplx> psi0, const LineGrid& grid, NlsSign sign, double horizon,
                   double dt);

}  // namespace scatlab
