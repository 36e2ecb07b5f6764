#include "scatlab/propagator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "scatlab/errors.hpp"

namespace scatlab {

double default_time_step(const Potential& V) {
  const double s = V.sup_norm();
  if (!std::isfinite(s)) throw InvalidArgument("split-step: potential has unbounded sup norm");
  return 0.01 / std::max(1.0, s);
}

std::size_t fft_friendly(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t k = m;
    for (std::size_t p : {2u, 3u, 5u})
      while (k % p == 0) k /= p;
    if (k == 1) return m;
  }
}

SplitStepPropagator::SplitStepPropagator(const Potential& V, const RadialGrid& grid, double max_dt)
    : grid_(grid), v_(V.sample(grid)), max_dt_(max_dt), sine_(grid) {
  if (!(max_dt > 0.0)) throw InvalidArgument("SplitStepPropagator: max_dt must be > 0");
  k2_.resize(grid.size());
  for (std::size_t m = 0; m < k2_.size(); ++m) {
    const double k = sine_.wavenumber(m);
    k2_[m] = k * k;
  }
}

void SplitStepPropagator::evolve(std::span<cplx> u, double t) const {
  if (t == 0.0) return;
  const std::size_t n = grid_.size();
  if (u.size() != n) throw InvalidArgument("SplitStepPropagator: size mismatch");
  const auto steps = static_cast<std::size_t>(std::ceil(std::abs(t) / max_dt_ - 1e-12));
  const double dt = t / static_cast<double>(steps);
  CplxVec half(n), full(n), kin(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    half[i] = std::polar(1.0, -0.5 * v_[i] * dt);
    full[i] = half[i] * half[i];
    kin[i] = std::polar(1.0, -k2_[i] * dt);
  }
  for (std::size_t i = 0; i < n; ++i) u[i] *= half[i];
  for (std::size_t s = 0; s < steps; ++s) {
    sine_.forward(u, c);
    for (std::size_t m = 0; m < n; ++m) c[m] *= kin[m];
    sine_.inverse(c, u);
    const CplxVec& phase = s + 1 == steps ? half : full;
    for (std::size_t i = 0; i < n; ++i) u[i] *= phase[i];
  }
}

double SplitStepPropagator::boundary_mass(std::span<const cplx> u) const {
  const std::size_t n = u.size();
  const std::size_t edge = std::max<std::size_t>(n / 20, 1);
  double total = 0.0, outer = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += std::norm(u[i]);
    if (i + edge >= n) outer += std::norm(u[i]);
  }
  return total > 0.0 ? outer / total : 0.0;
}

BoundStates bound_states(const Potential& V, const RadialGrid& grid, double threshold,
                         double sub_box) {
  const double h = grid.spacing();
  const std::size_t nb = std::min(grid.size(), static_cast<std::size_t>(std::ceil(sub_box / h)));
  const RadialGrid sub(h * static_cast<double>(nb), nb);
  const SineTransform sine(sub);
  // H = S^{-1} diag(k^2) S + diag(V), assembled column by column.
  Eigen::MatrixXd H(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));
  RealVec e(nb, 0.0), c(nb), col(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    e[j] = 1.0;
    sine.forward(e, c);
    for (std::size_t m = 0; m < nb; ++m) {
      const double k = sine.wavenumber(m);
      c[m] *= k * k;
    }
    sine.inverse(c, col);
    for (std::size_t i = 0; i < nb; ++i) H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    e[j] = 0.0;
  }
  H = 0.5 * (H + H.transpose()).eval();
  for (std::size_t i = 0; i < nb; ++i) H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += V(sub.node(i));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw NumericError("bound_states: eigensolver failed");
  BoundStates out;
  out.box = sub.r_max();
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (!(es.eigenvalues()[k] < threshold)) break;
    out.energies.push_back(es.eigenvalues()[k]);
    RealVec v(nb);
    double norm = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      v[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), k);
      norm += v[i] * v[i] * h;
    }
    const double sgn = v[0] < 0.0 ? -1.0 : 1.0;
    for (double& x : v) x *= sgn / std::sqrt(norm);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

void project_out(std::span<cplx> u, const BoundStates& b, double h) {
  for (const RealVec& phi : b.vectors) {
    const std::size_t m = std::min(phi.size(), u.size());
    cplx overlap = 0.0;
    for (std::size_t i = 0; i < m; ++i) overlap += phi[i] * u[i] * h;
    for (std::size_t i = 0; i < m; ++i) u[i] -= overlap * phi[i];
  }
}

}  // namespace scatlab
