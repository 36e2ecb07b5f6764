#pragma once

#include <memory>
#include <span>
#include <string>

#include "scatlab/numerics.hpp"

namespace scatlab {

// Dirichlet sine transform on a RadialGrid (DST-II / DST-III pair).
//
// u(r_i) = sum_m c_m sin(k_m r_i), k_m = m pi / r_max, m = 1..n. Coefficients
// are returned normalised, a_m = c_m sqrt(r_max / 2) (a_n = c_n sqrt(r_max)),
// so that sum_i |u_i|^2 h = sum_m |a_m|^2. The sine modes are the eigenvectors
// of -d^2/dr^2 with Dirichlet conditions at 0 and r_max, eigenvalue k_m^2.
class SineTransform {
 public:
  explicit SineTransform(const RadialGrid& grid);
  ~SineTransform();
  SineTransform(SineTransform&&) noexcept;
  SineTransform& operator=(SineTransform&&) noexcept;
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  std::size_t size() const noexcept;
  double wavenumber(std::size_t m) const noexcept;  // m = 0..n-1 maps to k_{m+1}

  void forward(std::span<const double> u, std::span<double> coeffs) const;
  void inverse(std::span<const double> coeffs, std::span<double> u) const;
  void forward(std::span<const cplx> u, std::span<cplx> coeffs) const;
  void inverse(std::span<const cplx> coeffs, std::span<cplx> u) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SineSpectrum {
  RealVec coeffs;
  double boundary_mass = 0.0;  // fraction of sum |u|^2 h in the outer 5% of the grid
  std::string warning;         // non-empty when boundary_mass exceeds the threshold
};

// One-shot convenience wrapper with the boundary-mass diagnostic.
SineSpectrum sine_transform(const RadialGrid& grid, std::span<const double> u,
                            double boundary_threshold = 1e-6);
RealVec inverse_sine_transform(const RadialGrid& grid, std::span<const double> coeffs);

// Unnormalised complex FFT on a LineGrid: forward X_k = sum_j x_j e^{-2 pi i jk/n},
// backward without the 1/n factor.
class LineFFT {
 public:
  explicit LineFFT(std::size_t n);
  ~LineFFT();
  LineFFT(LineFFT&&) noexcept;
  LineFFT& operator=(LineFFT&&) noexcept;
  LineFFT(const LineFFT&) = delete;
  LineFFT& operator=(const LineFFT&) = delete;

  std::size_t size() const noexcept;
  void forward(std::span<cplx> data) const;
  void backward(std::span<cplx> data) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Angular frequency of FFT bin k on a grid with spacing h and n points.
double fft_frequency(std::size_t k, std::size_t n, double h);

}  // namespace scatlab
