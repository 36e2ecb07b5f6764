#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>

#include "scatlab/freefield.hpp"
#include "scatlab/potentials.hpp"

namespace scatlab {

// I + R0(lambda^2 +/- i eps) V on a radial grid. Matrices act on samples of
// psi (not u = r psi) so that max-row-sum norms are the discrete L^inf -> L^inf
// operator norms.
struct BirmanSchwinger {
  EnergyKernel kernel;
  RealVec v;               // V at the grid nodes
  Eigen::MatrixXcd r0v;    // R0 V
  double row_sum_norm = 0.0;
  double condition = 1.0;  // estimate of cond_1(I + R0 V)
  std::shared_ptr<const Eigen::PartialPivLU<Eigen::MatrixXcd>> lu;

  double lambda() const noexcept { return kernel.lambda; }
  Eigen::MatrixXcd system() const;  // I + R0 V
};

BirmanSchwinger assemble_bs(const Potential& V, const RadialGrid& grid, double lambda, Branch sign,
                            double eps);

// Symmetric form U |V|^{1/2} R0 |V|^{1/2} (u representation), similar to R0 V.
Eigen::MatrixXcd symmetric_bs_matrix(const BirmanSchwinger& bs);

double max_row_sum(const Eigen::MatrixXcd& m);

// Smallest singular value of the LU-factored matrix by inverse power iteration.
double smallest_singular_value(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu,
                               std::size_t iterations = 60);

struct BsInverse {
  Eigen::MatrixXcd inverse;
  double norm = 0.0;      // max-row-sum
  double residual = 0.0;  // ||(I + K) inv - I||_inf
  double sigma_min = 0.0;
};

inline constexpr double kConditionLimit = 1e12;

// Throws SingularAtEnergy when the condition estimate exceeds `condition_limit`.
BsInverse invert_bs(const BirmanSchwinger& bs, double condition_limit = kConditionLimit);

// Same, but additionally probes the grid-refinement trend of the smallest
// singular value on two coarser copies of the grid; a trend toward zero
// (slope < -0.25 per doubling) is reported as SingularAtEnergy.
BsInverse invert_bs_checked(const Potential& V, const RadialGrid& grid, double lambda, Branch sign,
                            double eps);

struct BornResult {
  Eigen::MatrixXcd partial_sum;  // sum_{m < terms} (-R0 V)^m R0, psi representation
  RealVec term_norms;
  RealVec ratios;
  std::size_t terms = 0;
  bool convergent = false;
  // ||partial_sum - (I + R0 V)^{-1} R0|| / ||(I + R0 V)^{-1} R0||, when the
  // direct inversion succeeded.
  std::optional<double> agreement;
  std::string note;
};

BornResult born_series_resolvent(const Potential& V, const RadialGrid& grid, double lambda,
                                 std::size_t n_terms, Branch sign = Branch::Plus, double eps = 0.0);

// Full resolvent R = (I + R0 V)^{-1} R0 in the psi representation.
Eigen::MatrixXcd perturbed_resolvent(const BirmanSchwinger& bs);

enum class ZeroStatus { Regular, NonRegular, Indeterminate };
std::string to_string(ZeroStatus s);

struct RefinementLevel {
  std::size_t n = 0;
  double sigma_min = 0.0;
  double inverse_norm = 0.0;
  int negative_eigenvalues = 0;
};

struct RegularityReport {
  std::string potential;
  double r_max = 0.0;
  std::vector<RefinementLevel> levels;
  double sigma_slope = 0.0;  // d log2 sigma_min / d log2 n
  ZeroStatus status = ZeroStatus::Indeterminate;
  double m00 = 0.0;
  std::optional<double> null_residual;  // against the analytic resonance, when known
  int negative_eigenvalues = 0;
  bool eigenvalue_count_stable = false;
  std::optional<double> m0;
  std::string to_json() const;
};

RegularityReport zero_energy_report(const Potential& V, double r_max,
                                    std::span<const std::size_t> levels);

// Number of eigenvalues below `energy` of the Dirichlet finite-difference
// radial Hamiltonian -u'' + V u on the grid (Sturm count).
int count_eigenvalues_below(const Potential& V, const RadialGrid& grid, double energy = 0.0);

struct M0Entry {
  double lambda = 0.0;
  double eps = 0.0;
  Branch sign = Branch::Plus;
  double norm = 0.0;
};

struct M0Sweep {
  double m0 = 0.0;
  double m0_plus = 0.0;
  double m0_minus = 0.0;
  M0Entry argmax;
  std::vector<M0Entry> entries;
};

// sup over lambda, eps and both branches of ||(I + R0 V)^{-1}||_{inf->inf}.
// `regularity`, when given, must report Regular.
M0Sweep m0_sweep(const Potential& V, const RadialGrid& grid, std::span<const double> lambdas,
                 std::span<const double> eps, const RegularityReport* regularity = nullptr);

}  // namespace scatlab
