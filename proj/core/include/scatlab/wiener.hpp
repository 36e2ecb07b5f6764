#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "scatlab/numerics.hpp"
#include "scatlab/potentials.hpp"

namespace scatlab {

// rho -> T(rho), sampled on a symmetric LineGrid, each sample an operator on
// radial functions in L^1(R^3) acting on psi samples. Empty matrices stand for
// zero samples (families built from V vanish for rho < 0).
//
// Norms are those of X -> L^1(R; X) with X = L^1(r^2 dr):
//   |T| = max_j \int sum_i |T(rho)_ij| w_i / w_j d rho.
struct RhoKernelFamily {
  LineGrid rho{1.0, 2};
  RealVec weights;  // r_i^2 for radial grids, 1 for scalar families
  std::vector<Eigen::MatrixXcd> samples;
  // Set by build_t_minus; lets fourier_transform integrate exactly in rho and
  // wiener_invert probe the symbol under radial refinement.
  std::optional<Potential> source;
  std::optional<RadialGrid> radial;

  std::size_t dim() const noexcept { return weights.size(); }
  bool is_zero_at(std::size_t m) const { return samples[m].size() == 0; }
  double algebra_norm() const;
  // max_j sum_i |A_ij| w_i / w_j
  double kernel_norm(const Eigen::MatrixXcd& a) const;

  static RhoKernelFamily zero(const LineGrid& rho, RealVec weights);
  // The family with sample `value` at the node nearest rho0 (a delta of mass value * h).
  static RhoKernelFamily spike(const LineGrid& rho, RealVec weights, double rho0,
                               const Eigen::MatrixXcd& value);
};

// Discretized (T^-(rho) f)(r) = V(r) / (2r) \int_{|r-rho|}^{r+rho} s f(s) ds.
// The s-integral is taken against the piecewise-linear interpolant of
// u = r f through (0, 0), the same discretization the free resolvent kernel
// uses, so the exact rho-transform is V R0^-(lambda^2) on the same grid.
Eigen::MatrixXcd t_minus_sample(const Potential& V, const RadialGrid& grid, double rho);

// rho-grid spacing h/2 by default; throws when the grid does not reach 2 r_max + h.
RhoKernelFamily build_t_minus(const Potential& V, const RadialGrid& grid, const LineGrid& rho);

// Same grid required (InvalidArgument otherwise). Linear convolution on the window.
RhoKernelFamily convolve(const RhoKernelFamily& s, const RhoKernelFamily& t);
RhoKernelFamily add(const RhoKernelFamily& s, const RhoKernelFamily& t, cplx scale = 1.0);

struct FourierSamples {
  RealVec lambdas;
  std::vector<Eigen::MatrixXcd> values;
  RealVec norms;             // kernel norm per lambda
  double family_norm = 0.0;  // |T| of the family
  double bound_slack = 0.0;  // |T| - sup norms
  bool exact = false;        // rho-integral exact (built from V) rather than Filon
};

// T^(lambda) = \int e^{-i lambda rho} T(rho) d rho. Families built from V are
// integrated exactly piece by piece; other families by Filon's rule on the
// piecewise-linear interpolant. Requires h max|lambda| <= pi / 4.
FourierSamples fourier_transform(const RhoKernelFamily& t, std::span<const double> lambdas);

// Discrete-time transform h sum_m e^{-i lambda rho_m} T_m (the symbol of the
// sampled algebra), at arbitrary lambda.
Eigen::MatrixXcd discrete_symbol(const RhoKernelFamily& t, double lambda);

struct WienerDiagnostics {
  RealVec deltas, modulus;  // |T(.) - T(. - delta)|
  double modulus_rate = 0.0;  // fitted log-log slope of modulus over delta
  RealVec radii, tail;        // |T chi_{|rho| >= R}|
  RealVec lambdas, sigma_min;  // of I + T^(lambda) at the DFT nodes
  std::string to_csv() const;
};

WienerDiagnostics wiener_diagnostics(const RhoKernelFamily& t);

struct WienerOptions {
  double sigma_floor = 1e-8;
  // Local minima of sigma_min below this level are refined in lambda; for
  // families built from V the smallest one is also probed under radial
  // refinement (n, 2n, 4n) and a log-log slope below `trend_slope` is singular.
  double refine_level = 0.1;
  double trend_slope = -0.25;
  bool check_residual = true;
};

struct WienerInverse {
  RhoKernelFamily s;
  double norm = 0.0;  // |S|
  double left_residual = 0.0;   // |(1 + T) * (1 + S) - 1|
  double right_residual = 0.0;  // |(1 + S) * (1 + T) - 1|
  double sigma_min = 0.0;
  double sigma_min_lambda = 0.0;
  double max_inverse_norm = 0.0;  // max over lambda nodes of |(I + T^)^{-1}|
  WienerDiagnostics diagnostics;
};

// 1 + S = (1 + T)^{-1}: per-node inversion of the discrete symbol and inverse
// transform. Throws NonInvertibleSymbol with the offending lambda.
WienerInverse wiener_invert(const RhoKernelFamily& t, const WienerOptions& opts = {});

// sum_{k=1}^{terms} (-1)^k T^{*k}
RhoKernelFamily neumann_series(const RhoKernelFamily& t, std::size_t terms);

// Scalar version on the same engine: samples f(rho_m), returns g with
// (delta + f) * (delta + g) = delta.
struct ScalarWiener {
  CplxVec g;
  double residual = 0.0;
  double min_symbol = 0.0;  // min |1 + f^|
  double min_symbol_lambda = 0.0;
};
ScalarWiener scalar_wiener_check(std::span<const cplx> f, const LineGrid& rho,
                                 const WienerOptions& opts = {});

}  // namespace scatlab
