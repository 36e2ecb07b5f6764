#include "scatlab/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

#include "scatlab/errors.hpp"

namespace scatlab {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}
}  // namespace

struct SineTransform::Impl {
  std::size_t n;
  double r_max;
  double* buf_in;
  double* buf_out;
  fftw_plan fwd;
  fftw_plan inv;

  Impl(std::size_t n_, double r_max_) : n(n_), r_max(r_max_) {
    buf_in = fftw_alloc_real(n);
    buf_out = fftw_alloc_real(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int ni = static_cast<int>(n);
    fwd = fftw_plan_r2r_1d(ni, buf_in, buf_out, FFTW_RODFT10, FFTW_ESTIMATE);
    inv = fftw_plan_r2r_1d(ni, buf_in, buf_out, FFTW_RODFT01, FFTW_ESTIMATE);
  }
  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(buf_in);
    fftw_free(buf_out);
  }

  void forward(const double* u, double* a) const {
    std::memcpy(buf_in, u, n * sizeof(double));
    fftw_execute_r2r(fwd, buf_in, buf_out);
    const double nd = static_cast<double>(n);
    const double s = std::sqrt(r_max / 2.0);
    for (std::size_t m = 0; m + 1 < n; ++m) a[m] = buf_out[m] / nd * s;
    a[n - 1] = buf_out[n - 1] / (2.0 * nd) * std::sqrt(r_max);
  }

  void inverse(const double* a, double* u) const {
    const double s = std::sqrt(r_max / 2.0);
    for (std::size_t m = 0; m + 1 < n; ++m) buf_in[m] = 0.5 * a[m] / s;
    buf_in[n - 1] = a[n - 1] / std::sqrt(r_max);
    fftw_execute_r2r(inv, buf_in, buf_out);
    std::memcpy(u, buf_out, n * sizeof(double));
  }
};

SineTransform::SineTransform(const RadialGrid& grid)
    : impl_(std::make_unique<Impl>(grid.size(), grid.r_max())) {}
SineTransform::~SineTransform() = default;
SineTransform::SineTransform(SineTransform&&) noexcept = default;
SineTransform& SineTransform::operator=(SineTransform&&) noexcept = default;

std::size_t SineTransform::size() const noexcept { return impl_->n; }

double SineTransform::wavenumber(std::size_t m) const noexcept {
  return static_cast<double>(m + 1) * kPi / impl_->r_max;
}

void SineTransform::forward(std::span<const double> u, std::span<double> coeffs) const {
  impl_->forward(u.data(), coeffs.data());
}
void SineTransform::inverse(std::span<const double> coeffs, std::span<double> u) const {
  impl_->inverse(coeffs.data(), u.data());
}

void SineTransform::forward(std::span<const cplx> u, std::span<cplx> coeffs) const {
  const std::size_t n = impl_->n;
  RealVec re(n), im(n), a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = u[i].real();
    im[i] = u[i].imag();
  }
  impl_->forward(re.data(), a.data());
  impl_->forward(im.data(), b.data());
  for (std::size_t i = 0; i < n; ++i) coeffs[i] = cplx(a[i], b[i]);
}

void SineTransform::inverse(std::span<const cplx> coeffs, std::span<cplx> u) const {
  const std::size_t n = impl_->n;
  RealVec re(n), im(n), a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = coeffs[i].real();
    im[i] = coeffs[i].imag();
  }
  impl_->inverse(re.data(), a.data());
  impl_->inverse(im.data(), b.data());
  for (std::size_t i = 0; i < n; ++i) u[i] = cplx(a[i], b[i]);
}

SineSpectrum sine_transform(const RadialGrid& grid, std::span<const double> u,
                            double boundary_threshold) {
  if (u.size() != grid.size()) throw InvalidArgument("sine_transform: size mismatch");
  SineSpectrum out;
  out.coeffs.resize(u.size());
  SineTransform(grid).forward(u, out.coeffs);
  double total = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double m = u[i] * u[i] * grid.weight(i);
    total += m;
    if (grid.node(i) > 0.95 * grid.r_max()) edge += m;
  }
  out.boundary_mass = total > 0.0 ? edge / total : 0.0;
  if (out.boundary_mass > boundary_threshold)
    out.warning = "data not supported away from r_max: boundary mass fraction " +
                  std::to_string(out.boundary_mass);
  return out;
}

RealVec inverse_sine_transform(const RadialGrid& grid, std::span<const double> coeffs) {
  RealVec u(grid.size());
  SineTransform(grid).inverse(coeffs, u);
  return u;
}

struct LineFFT::Impl {
  std::size_t n;
  fftw_complex* buf;
  fftw_plan fwd;
  fftw_plan bwd;

  explicit Impl(std::size_t n_) : n(n_) {
    buf = fftw_alloc_complex(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(buf);
  }
  void run(fftw_plan p, std::span<cplx> data) const {
    std::memcpy(buf, data.data(), n * sizeof(fftw_complex));
    fftw_execute(p);
    std::memcpy(static_cast<void*>(data.data()), buf, n * sizeof(fftw_complex));
  }
};

LineFFT::LineFFT(std::size_t n) : impl_(std::make_unique<Impl>(n)) {}
LineFFT::~LineFFT() = default;
LineFFT::LineFFT(LineFFT&&) noexcept = default;
LineFFT& LineFFT::operator=(LineFFT&&) noexcept = default;
std::size_t LineFFT::size() const noexcept { return impl_->n; }
void LineFFT::forward(std::span<cplx> data) const { impl_->run(impl_->fwd, data); }
void LineFFT::backward(std::span<cplx> data) const { impl_->run(impl_->bwd, data); }

double fft_frequency(std::size_t k, std::size_t n, double h) {
  const long kk = k < (n + 1) / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
  return 2.0 * kPi * static_cast<double>(kk) / (static_cast<double>(n) * h);
}

}  // namespace scatlab
