#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>

#include "scatlab/numerics.hpp"
#include "scatlab/potentials.hpp"
#include "scatlab/restriction.hpp"
#include "scatlab/transforms.hpp"

namespace scatlab {

// Samples of psi on a radial grid (3D radial functions, psi(|x|)) or on a
// periodic line grid (1D). Norms are those of the underlying function on R^3
// or R respectively.
class WavePacket {
 public:
  static WavePacket radial(const RadialGrid& grid, CplxVec psi);
  static WavePacket radial(const RadialGrid& grid, const std::function<cplx(double)>& f);
  static WavePacket line(const LineGrid& grid, CplxVec psi);
  static WavePacket line(const LineGrid& grid, const std::function<cplx(double)>& f);

  Dimension dimension() const noexcept {
    return std::holds_alternative<RadialGrid>(grid_) ? Dimension::Radial3D : Dimension::Line1D;
  }
  const RadialGrid& radial_grid() const;
  const LineGrid& line_grid() const;
  std::size_t size() const noexcept { return psi_.size(); }
  std::span<const cplx> values() const noexcept { return psi_; }
  cplx operator[](std::size_t i) const { return psi_[i]; }

  double l1() const noexcept { return l1_; }
  double l2() const noexcept { return l2_; }
  double linf() const noexcept { return linf_; }

  // u = r psi on the radial grid.
  CplxVec reduced() const;
  static WavePacket from_reduced(const RadialGrid& grid, std::span<const cplx> u);

 private:
  WavePacket(std::variant<RadialGrid, LineGrid> grid, CplxVec psi);
  void refresh_norms();

  std::variant<RadialGrid, LineGrid> grid_;
  CplxVec psi_;
  double l1_ = 0.0, l2_ = 0.0, linf_ = 0.0;
};

struct FreeEvolution {
  WavePacket packet;
  double boundary_mass = 0.0;  // fraction of L^2 mass in the outer 5% of the box
  bool reflection_flag = false;
};

// e^{-itH0} with H0 = -Laplacian, diagonalised once per grid. 3D radial data
// evolve as u = r psi under -d^2/dr^2 with Dirichlet conditions at 0 and r_max;
// 1D data on the periodic box.
class FreePropagator {
 public:
  explicit FreePropagator(const RadialGrid& grid);
  explicit FreePropagator(const LineGrid& grid);

  // Spectral coefficients of the packet (normalised sine or plain FFT).
  CplxVec analyse(const WavePacket& f) const;
  WavePacket synthesise(std::span<const cplx> coeffs) const;
  // coeffs <- e^{-i k^2 t} coeffs
  void advance(std::span<cplx> coeffs, double t) const;
  const RealVec& wavenumbers() const noexcept { return k_; }

  FreeEvolution propagate(const WavePacket& f, double t) const;

 private:
  std::variant<RadialGrid, LineGrid> grid_;
  std::shared_ptr<SineTransform> sine_;
  std::shared_ptr<LineFFT> fft_;
  RealVec k_;
};

inline constexpr double kReflectionThreshold = 1e-6;

FreeEvolution free_propagate(const WavePacket& f, double t);

// Boundary value of the free resolvent (-Delta - (lambda^2 +/- i eps))^{-1}.
enum class Branch { Plus, Minus };

// k with k^2 = lambda^2 +/- i eps and Im k >= 0 (the outgoing/incoming root).
cplx resolvent_wavenumber(double lambda, Branch sign, double eps);

// Radial Green's function of -d^2/dr^2 - k^2 on u = r psi, Dirichlet at 0:
// G(r, s) = sin(k r_<) e^{i k r_>} / k, and min(r, s) at k = 0.
cplx radial_green(double r, double s, cplx k);

// The 3D kernel e^{i k d} / (4 pi d) at distance d.
cplx free_resolvent_point(double d, cplx k);

// Dense discretisation on a radial grid acting on u = r psi, with the
// quadrature folded in: (K u)_i = \int G(r_i, s) u~(s) ds where u~ is the
// piecewise-linear interpolant through (0, 0), (r_1, u_1), ..., (r_n, u_n).
struct EnergyKernel {
  RadialGrid grid;
  double lambda = 0.0;
  Branch sign = Branch::Plus;
  double eps = 0.0;
  cplx k;
  Eigen::MatrixXcd entries;

  // Same operator acting on psi samples: diag(1/r) K diag(r).
  Eigen::MatrixXcd psi_representation() const;
};

EnergyKernel free_resolvent_kernel(const RadialGrid& grid, double lambda, Branch sign, double eps);

// O(n) application of the same discretisation as free_resolvent_kernel.
CplxVec apply_free_resolvent(const RadialGrid& grid, std::span<const cplx> u, cplx k);

struct IdentityCheck {
  double residual = 0.0;  // relative L^2 residual between the two sides
  cplx constant;          // c used on the right-hand side
  cplx fitted_constant;   // least-squares c for this instance
  double lhs_norm = 0.0;
};

// [R0(lambda^2 + i0) - R0(lambda^2 - i0)] f against c lambda^{-1} sigma^_{lambda S^2} * f
// on the grid. When `c` is empty the fitted constant is used (calibration run).
IdentityCheck imaginary_part_identity_check(double lambda, const std::function<double(double)>& f,
                                            const RadialGrid& grid, std::optional<cplx> c = {});

// c with the Fourier convention f^(xi) = \int f e^{-i x xi}: i / (8 pi^2).
cplx imaginary_part_constant_exact();

struct KrsSample {
  double lambda = 0.0;
  double ratio = 0.0;
  double best_sigma = 0.0;
};

struct KrsProbe {
  PowerLawFit fit;
  std::vector<KrsSample> samples;
  double p = 0.0;  // exponent p_d used for the L^p -> L^p' ratio
};

// Lower-bound probe of ||R0(lambda^2 + i0)||_{p -> p'} over the family
// g_{sigma,lambda}(r) = exp(-r^2 / (2 sigma^2)) sin(lambda r) / r.
KrsProbe krs_decay_probe(std::span<const double> lambdas, std::span<const double> sigmas,
                         std::size_t n_per_unit = 16);

// Exponent fit of externally supplied ratios (used for synthetic checks).
PowerLawFit fit_decay_ratios(std::span<const double> lambdas, std::span<const double> ratios);

}  // namespace scatlab
