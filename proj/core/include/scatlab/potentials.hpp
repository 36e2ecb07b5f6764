#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <string>

#include "scatlab/numerics.hpp"

namespace scatlab {

enum class PotentialKind { Gaussian, Yukawa, AubinTalenti, Table, Custom };
enum class Dimension { Radial3D, Line1D };

std::string to_string(PotentialKind kind);

// Real radial potential V(r), held as a closed form (or an interpolated table)
// plus the metadata the norm calculators need. Immutable after construction.
class Potential {
 public:
  // V(r) = A exp(-(r/scale)^2)
  static Potential gaussian(double amplitude, double scale = 1.0);
  // V(r) = A exp(-r/scale) / r
  static Potential yukawa(double amplitude, double scale = 1.0);
  // V(r) = -5 W_lambda(r)^4 with W_lambda(r) = lambda^(1/2) (1 + lambda^2 r^2 / 3)^(-1/2)
  static Potential aubin_talenti(double lambda_scale = 1.0);
  // Piecewise-linear interpolation of (r, V) samples; zero beyond the last node.
  static Potential table(RealVec r, RealVec v);
  // Arbitrary closed form. `support_radius` bounds where |V| is non-negligible;
  // `decay_power` is the algebraic decay rate p (V ~ r^-p) or 0 when faster.
  static Potential custom(std::string name, std::function<double(double)> profile,
                          double support_radius, double decay_power = 0.0, double sup_norm = -1.0);

  // Two-column CSV "r,V" with a mandatory header line.
  static Potential load_csv(std::istream& in);
  static Potential load_csv_file(const std::string& path);

  static Potential zero() { return gaussian(0.0); }

  PotentialKind kind() const noexcept { return kind_; }
  Dimension dimension() const noexcept { return Dimension::Radial3D; }
  double amplitude() const noexcept { return amplitude_; }
  double scale() const noexcept { return scale_; }
  const std::string& name() const noexcept { return name_; }

  double operator()(double r) const { return profile_(r); }
  RealVec sample(const RadialGrid& grid) const;

  // Radius beyond which |V| is below ~1e-16 relative (compact/exponential
  // kinds); for algebraically decaying kinds a radius where the power law has
  // set in, with decay_power() > 0.
  double support_radius() const noexcept { return support_radius_; }
  double decay_power() const noexcept { return decay_power_; }
  double sup_norm() const noexcept { return sup_norm_; }
  bool is_zero() const noexcept { return is_zero_; }

  // 3D Fourier transform V^(xi) = \int V(x) e^{-i x.xi} dx as a function of |xi|.
  double fourier(double xi) const;
  bool has_closed_form_fourier() const noexcept { return static_cast<bool>(fourier_); }

  // c V, sharing the closed form.
  Potential scaled(double c) const;

 private:
  Potential() = default;

  PotentialKind kind_ = PotentialKind::Custom;
  std::string name_;
  double amplitude_ = 0.0;
  double scale_ = 1.0;
  double support_radius_ = 0.0;
  double decay_power_ = 0.0;
  double sup_norm_ = 0.0;
  bool is_zero_ = false;
  std::function<double(double)> profile_;
  std::function<double(double)> fourier_;
};

// Aubin-Talenti profile and the zero-energy resonance of -Delta - 5 W^4.
double aubin_talenti_w(double r, double lambda_scale = 1.0);
// psi = d/dmu|_{mu=lambda} W_mu, i.e. W/2 + r W' at unit scale.
double aubin_talenti_resonance(double r, double lambda_scale = 1.0);

struct AubinTalenti {
  Potential potential;
  RealVec psi;  // resonance function sampled on the grid
};
AubinTalenti aubin_talenti(double lambda_scale, const RadialGrid& grid);

struct NormOptions {
  // Integration radius for potentials without compact support.
  double r_max = 200.0;
  // Number of Kato-norm centres on [0, r_max].
  std::size_t kato_centers = 400;
  std::size_t mq_centers = 240;
};

struct KatoNorm {
  double value = 0.0;
  double argmax = 0.0;  // centre |x| attaining the sup
  double tail = 0.0;    // analytic tail beyond the integration radius
};

// sup_x \int |V(y)| / |x - y| dy, sup over centres on a radial grid.
KatoNorm kato_norm(const Potential& v, const NormOptions& opts = {});

struct DyadicNorm {
  double value = 0.0;
  double tail = 0.0;
  std::size_t shells = 0;
};

// ||1_{|x|<=1} V||_2 + sum_{j>=0} 2^{j beta} ||1_{2^j<=|x|<=2^{j+1}} V||_2
DyadicNorm b_beta_norm(const Potential& v, double beta, const NormOptions& opts = {});

struct YStarNorms {
  double y_norm = 0.0;
  double y_tail = 0.0;
  bool y_converged = true;
  std::size_t shells = 0;
  double mq_lp = 0.0;
};

// ||V||_Y = sum_j 2^j ||V||_{L^inf(D_j)} and ||M_q V||_{L^outer_p}.
YStarNorms y_star_norms(const Potential& v, double q, double outer_p, const NormOptions& opts = {});

struct NormReport {
  double l2 = 0.0;
  double lp = 0.0;
  double p = 2.0;
  double kato = 0.0;
  double b_beta = 0.0;
  double beta = 0.5;
  double y_norm = 0.0;
  double mq_lp = 0.0;
  double q = 1.5;
  double outer_p = 2.0;
};

double lp_norm(const Potential& v, double p, const NormOptions& opts = {});
NormReport norm_report(const Potential& v, double p, double beta, double q, double outer_p,
                       const NormOptions& opts = {});

}  // namespace scatlab
