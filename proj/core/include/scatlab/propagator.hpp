#pragma once

#include "scatlab/freefield.hpp"
#include "scatlab/potentials.hpp"

namespace scatlab {

// Largest time step the split-step schemes accept: 0.01 / max(1, ||V||_inf).
double default_time_step(const Potential& V);

// Smallest m >= n of the form 2^a 3^b 5^c.
std::size_t fft_friendly(std::size_t n);

// Strang splitting for e^{-itH}, H = -Laplacian + V, on the radial reduction
// u = r psi: half potential phase, exact free step in the sine basis, half
// potential phase. Consecutive half phases are merged.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const Potential& V, const RadialGrid& grid, double max_dt);

  const RadialGrid& grid() const noexcept { return grid_; }
  double max_dt() const noexcept { return max_dt_; }
  const RealVec& potential() const noexcept { return v_; }

  // u <- e^{-itH} u; t may be negative. Uses ceil(|t| / max_dt) equal steps.
  void evolve(std::span<cplx> u, double t) const;
  // Fraction of sum |u|^2 in the outer 5% of the box.
  double boundary_mass(std::span<const cplx> u) const;

 private:
  RadialGrid grid_;
  RealVec v_;
  double max_dt_;
  SineTransform sine_;
  RealVec k2_;
};

struct BoundStates {
  RealVec energies;
  std::vector<RealVec> vectors;  // u = r psi on the leading nodes of the grid, sum u^2 h = 1
  double box = 0.0;              // radius of the sub-box used for the eigensolve
};

// Eigenpairs of the sine-spectral radial Hamiltonian below `threshold`,
// computed on [0, sub_box] with the grid spacing of `grid`.
BoundStates bound_states(const Potential& V, const RadialGrid& grid, double threshold = -1e-6,
                         double sub_box = 60.0);

// u <- u - sum <phi, u> phi
void project_out(std::span<cplx> u, const BoundStates& b, double h);

}  // namespace scatlab
