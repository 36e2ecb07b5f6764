#pragma once

#include <array>

#include "scatlab/numerics.hpp"

namespace scatlab {

using Vec3 = std::array<double, 3>;

// Stein-Tomas exponent p_d = (2d + 2) / (d + 3).
double tomas_exponent(int d);

enum class SurfaceKind { Sphere, Circle, Cap };

// Quadrature on the sphere of radius `radius` in R^3 (Gauss-Legendre in
// cos(theta) times trapezoid in phi), on a circle in R^2 (trapezoid), or on a
// smoothed polar cap of S^2 of angular diameter `cap_diameter`.
struct SurfaceMeasure {
  SurfaceKind kind = SurfaceKind::Sphere;
  int dimension = 3;
  double radius = 1.0;
  double cap_diameter = 0.0;
  double max_node_spacing = 0.0;
  std::vector<Vec3> nodes;
  RealVec weights;

  double total_mass() const;
};

SurfaceMeasure sphere_measure(double radius, std::size_t polar_order);
SurfaceMeasure circle_measure(double radius, std::size_t nodes);
// Smoothed cap indicator folded into the weights.
SurfaceMeasure cap_measure(double delta, std::size_t polar_order = 64, std::size_t azimuth = 64);
// Sphere or circle with enough nodes to resolve |xi| <= xi_max.
SurfaceMeasure resolved_measure(int d, double radius, double xi_max);

// C^infinity step: 1 for t <= -1, 0 for t >= 1.
double smooth_step(double t);
// Smoothed cap profile in the polar angle: 1 inside delta/2 - 0.1 delta,
// 0 outside delta/2 + 0.1 delta.
double cap_profile(double theta, double delta);

// sigma^(xi) = \int e^{-i xi . w} dsigma(w). Throws when the quadrature does
// not resolve the oscillation (node spacing > pi / (4 |xi|)).
cplx sigma_hat(const SurfaceMeasure& s, const Vec3& xi);
// Along the last coordinate axis, for a list of |xi|.
CplxVec sigma_hat(const SurfaceMeasure& s, std::span<const double> xi_norms);

// 4 pi r^2 sin(r |xi|) / (r |xi|)
double sigma_hat_sphere_exact(double radius, double xi);

struct DecayFit {
  PowerLawFit fit;
  RealVec xi;        // sample points
  RealVec modulus;   // |sigma^| at the samples
  RealVec peak_xi;   // local envelope maxima used by the fit
  RealVec peak_value;
};

// Envelope decay of |sigma^| for the unit sphere (d = 3) or circle (d = 2).
DecayFit sigma_hat_decay(int d, double xi_min = 5.0, double xi_max = 100.0,
                         std::size_t samples = 4000);

struct DyadicPiece {
  int j = 0;
  double norm_1_inf = 0.0;
  double norm_2_2 = 0.0;
};

struct TomasReport {
  std::vector<DyadicPiece> pieces;
  double slope_1_inf = 0.0;  // log2 norm per unit j
  double slope_2_2 = 0.0;
  double critical_p = 0.0;   // implied by interpolating the two slopes
};

// Smooth dyadic bump supported in [1/2, 2], partition of unity in log2 r.
double dyadic_bump(double r);

// Pieces T_j with kernel sigma^(x) chi(|x| / 2^j) for S^2.
std::vector<DyadicPiece> tomas_dyadic_norms(std::span<const int> js, int d = 3);
TomasReport tomas_report(std::span<const int> js, int d = 3);
// 1/p = theta/2 + (1 - theta) with theta s_22 + (1 - theta) s_1inf = 0.
double implied_critical_index(double slope_1_inf, double slope_2_2);

struct KnappRow {
  double delta = 0.0;
  double ratio = 0.0;          // ||(f sigma)^||_4 / ||f||_{L^2(S^2)}
  double peak = 0.0;           // max |(f sigma)^|
  double long_extent = 0.0;    // half-max level set half-length along the cap axis
  double short_extent = 0.0;   // transverse half-width
  double long_extent_q = 0.0;  // same at quarter max
  double short_extent_q = 0.0;
};

struct KnappReport {
  std::vector<KnappRow> rows;
  double ratio_variation = 0.0;  // max / min ratio
  double long_exponent = 0.0;    // vs R = 1 / delta
  double short_exponent = 0.0;
  double peak_exponent = 0.0;
  double exponent_p = 0.0;       // Lebesgue exponent of the dual norm used
};

struct KnappOptions {
  // Window in scaled coordinates z = R^2 zeta, rho = R eta.
  double zeta_max = 40.0;
  double eta_max = 16.0;
  double step = 0.1;
  std::size_t polar_order = 48;
};

KnappRow knapp_row(double delta, double p_dual, const KnappOptions& opts = {});
KnappReport knapp_ratio(std::span<const double> deltas, const KnappOptions& opts = {});

// 1D packet a exp(-(x - x0)^2 / (2 w^2) + i (k0 x + phase)), unit L^2 norm when a = 1.
// Translating by s is center += s, phase -= k0 s.
struct Packet1D {
  double center = 0.0;
  double width = 1.0;
  double momentum = 0.0;
  double amplitude = 1.0;  // relative weight when packets are superposed
  double phase = 0.0;
};

struct StrichartzOptions {
  double truncation_mass = 0.01;  // allowed mass near the box edge at |t| = t0
  std::size_t time_panels = 16;   // Gauss-Legendre panels per time half-line piece
  std::size_t padding = 4;        // spectral zero-padding factor for |u|^6 sums
};

struct StrichartzValue {
  double ratio = 0.0;
  // Share of the space-time integral from |t| > t0, evaluated exactly through
  // the lens identity int_{|t|>t0} ||u(t)||_6^6 dt = 2 (4 pi)^-3 int_{|s|<1/t0} ||(f e^{i s y^2/4})^||_6^6 ds.
  double tail_fraction = 0.0;
  double box_mass = 0.0;  // mass within 5% of the box edge at |t| = t0
  double t0 = 0.0;
  std::size_t grid_points = 0;
};

// ||e^{-it Delta} f||_{L^6_{t,x}(R^2)} / ||f||_2 for f a superposition of
// packets, dilated as scale^{1/2} f(scale x).
StrichartzValue strichartz_value(std::span<const Packet1D> f, double scale = 1.0,
                                 const StrichartzOptions& opts = {});

struct StrichartzReport {
  double max_ratio = 0.0;
  double max_ratio_doubled = 0.0;
  double relative_change = 0.0;
  std::size_t family_size = 0;
};

// Deterministic family of `size` packets (single and paired Gaussians).
std::vector<std::vector<Packet1D>> strichartz_family(std::size_t size, unsigned seed = 7);
StrichartzReport strichartz_ratio(std::size_t family_size, unsigned seed = 7,
                                  const StrichartzOptions& opts = {});

// The Gaussian extremiser value 12^{-1/12}.
double strichartz_gaussian_constant();

}  // namespace scatlab
