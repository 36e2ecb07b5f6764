#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "scatlab/birman.hpp"
#include "scatlab/errors.hpp"
#include "scatlab/potentials.hpp"
#include "scatlab/wiener.hpp"

using namespace scatlab;

namespace {

// Spherical mean oracle: (T f)(r) = V(r) / (4 pi rho) \int_{|y| = rho} f(|x + y|) dsigma(y)
// = V(r) rho / 2 \int_{-1}^{1} f(sqrt(r^2 + rho^2 + 2 r rho c)) dc, with f = u~ / s for the
// piecewise-linear u~ through (0, 0) and the grid samples. The c-integral is split at
// the grid nodes so every piece is smooth.
double spherical_mean(const RadialGrid& g, const RealVec& u, double r, double rho) {
  auto u_tilde = [&](double s) {
    const double h = g.spacing();
    if (s <= g.node(0)) return u[0] * s / g.node(0);
    if (s >= g.node(g.size() - 1)) return 0.0;
    const std::size_t i = static_cast<std::size_t>((s - g.node(0)) / h);
    const double t = (s - g.node(i)) / h;
    return (1.0 - t) * u[i] + t * u[i + 1];
  };
  auto f = [&](double c) {
    const double s = std::sqrt(std::max(0.0, r * r + rho * rho + 2.0 * r * rho * c));
    return s > 0.0 ? u_tilde(s) / s : 0.0;
  };
  std::vector<double> cuts{-1.0, 1.0};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double c = (g.node(k) * g.node(k) - r * r - rho * rho) / (2.0 * r * rho);
    if (c > -1.0 && c < 1.0) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  const auto& gl = gauss_legendre(10);
  double sum = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], b = cuts[p + 1], m = 0.5 * (a + b), w = 0.5 * (b - a);
    for (std::size_t q = 0; q < gl.x.size(); ++q) sum += gl.w[q] * w * f(m + w * gl.x[q]);
  }
  return rho / 2.0 * sum;
}

RealVec ones(std::size_t d) { return RealVec(d, 1.0); }

RhoKernelFamily random_family(const LineGrid& rho, std::size_t d, double support, double scale,
                              std::mt19937& rng) {
  std::normal_distribution<double> n;
  auto f = RhoKernelFamily::zero(rho, ones(d));
  for (std::size_t m = 0; m < rho.size(); ++m) {
    if (std::abs(rho.node(m)) > support) continue;
    Eigen::MatrixXcd a(d, d);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = scale * cplx(n(rng), n(rng));
    f.samples[m] = a;
  }
  return f;
}

}  // namespace

TEST(Wiener, TMinusMatchesSphericalMeans) {
  RadialGrid g(6.0, 30);
  const auto V = Potential::gaussian(0.5);
  std::mt19937 rng(5);
  std::normal_distribution<double> n;
  RealVec u(g.size());
  for (auto& x : u) x = n(rng);
  Eigen::VectorXcd psi(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) psi[j] = u[j] / g.node(j);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  std::uniform_real_distribution<double> rho_dist(0.05, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t i = pick(rng);
    const double r = g.node(i), rho = rho_dist(rng);
    const Eigen::VectorXcd out = t_minus_sample(V, g, rho) * psi;
    const double oracle = V(r) * spherical_mean(g, u, r, rho);
    EXPECT_NEAR(out[i].real(), oracle, 1e-8 * (1.0 + std::abs(oracle))) << "r=" << r << " rho=" << rho;
    EXPECT_EQ(out[i].imag(), 0.0);
  }
}

TEST(Wiener, TMinusVanishesForNegativeRho) {
  RadialGrid g(4.0, 16);
  EXPECT_EQ(t_minus_sample(Potential::gaussian(0.5), g, -1.0).norm(), 0.0);
}

TEST(Wiener, NormBoundedByKatoNorm) {
  RadialGrid g(6.0, 30);
  const auto V = Potential::gaussian(0.5);
  const auto t = build_t_minus(V, g, LineGrid(25.6, 512));
  const double bound = kato_norm(V).value / (4.0 * M_PI);
  EXPECT_LE(t.algebra_norm(), bound * 1.01);
  EXPECT_GE(t.algebra_norm(), bound * 0.95);
}

TEST(Wiener, UndersampledWindowThrows) {
  EXPECT_THROW(build_t_minus(Potential::gaussian(0.5), RadialGrid(6.0, 30), LineGrid(8.0, 128)),
               InvalidArgument);
}

TEST(Wiener, FourierTransformIsTheResolventSymbol) {
  RadialGrid g(6.0, 30);
  const auto V = Potential::gaussian(0.5);
  const auto t = build_t_minus(V, g, LineGrid(25.6, 512));
  const double lambdas[] = {0.0, 0.7, 2.0};
  const auto ft = fourier_transform(t, lambdas);
  EXPECT_TRUE(ft.exact);
  EXPECT_GE(ft.bound_slack, -1e-3);
  const RealVec v = V.sample(g);
  const auto D = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()).cast<cplx>().asDiagonal();
  for (std::size_t k = 0; k < 3; ++k) {
    const auto bs = assemble_bs(V, g, lambdas[k], Branch::Minus, 0.0);
    const Eigen::MatrixXcd ref = D * bs.kernel.psi_representation();
    EXPECT_LT((ft.values[k] - ref).norm() / ref.norm(), 1e-10) << lambdas[k];
  }
}

TEST(Wiener, InverseOfRegularPotential) {
  RadialGrid g(6.0, 30);
  const auto t = build_t_minus(Potential::gaussian(0.5), g, LineGrid(25.6, 512));
  const auto inv = wiener_invert(t);
  EXPECT_LT(inv.left_residual, 1e-10);
  EXPECT_LT(inv.right_residual, 1e-10);
  EXPECT_GT(inv.sigma_min, 0.1);
  const auto neumann = neumann_series(t, 12);
  EXPECT_LT(add(inv.s, neumann, -1.0).algebra_norm(), 1e-6);
}

TEST(Wiener, ResonantPotentialIsNotInvertible) {
  RadialGrid g(16.0, 64);
  const auto t = build_t_minus(Potential::aubin_talenti(1.0), g, LineGrid(40.0, 640));
  try {
    wiener_invert(t);
    FAIL() << "expected NonInvertibleSymbol";
  } catch (const NonInvertibleSymbol& e) {
    EXPECT_LT(std::abs(e.lambda()), 0.1);
  }
}

TEST(Wiener, ZeroFamilyInvertsToZero) {
  const auto z = RhoKernelFamily::zero(LineGrid(4.0, 64), ones(3));
  const auto inv = wiener_invert(z);
  EXPECT_EQ(inv.norm, 0.0);
  EXPECT_EQ(z.algebra_norm(), 0.0);
}

TEST(Wiener, GridMismatchThrows) {
  const auto a = RhoKernelFamily::zero(LineGrid(4.0, 64), ones(3));
  const auto b = RhoKernelFamily::zero(LineGrid(4.0, 128), ones(3));
  EXPECT_THROW(convolve(a, b), InvalidArgument);
  EXPECT_THROW(add(a, b), InvalidArgument);
  EXPECT_THROW(RhoKernelFamily::zero(LineGrid(4.0, 64), RealVec{1.0, 0.0}), InvalidArgument);
}

// Algebraic laws on random compactly supported families.
class WienerAxioms : public ::testing::TestWithParam<unsigned> {};

TEST_P(WienerAxioms, DeltaIsTheUnit) {
  std::mt19937 rng(GetParam());
  const LineGrid rho(4.0, 64);
  const auto t = random_family(rho, 3, 1.2, 0.3, rng);
  const auto delta = RhoKernelFamily::spike(rho, ones(3), 0.0, Eigen::MatrixXcd::Identity(3, 3) / rho.spacing());
  EXPECT_LT(add(convolve(delta, t), t, -1.0).algebra_norm(), 1e-14);
  EXPECT_LT(add(convolve(t, delta), t, -1.0).algebra_norm(), 1e-14);
}

TEST_P(WienerAxioms, AssociativeSubmultiplicativeHomomorphic) {
  std::mt19937 rng(GetParam());
  const LineGrid rho(4.0, 64);
  const auto a = random_family(rho, 3, 1.2, 0.3, rng);
  const auto b = random_family(rho, 3, 1.2, 0.3, rng);
  const auto c = random_family(rho, 3, 1.2, 0.3, rng);
  const auto ab = convolve(a, b);
  EXPECT_LT(add(convolve(ab, c), convolve(a, convolve(b, c)), -1.0).algebra_norm(),
            1e-12 * ab.algebra_norm() * c.algebra_norm());
  EXPECT_LE(ab.algebra_norm(), a.algebra_norm() * b.algebra_norm() * (1.0 + 1e-12));
  for (double lambda : {0.0, 0.9, -2.3}) {
    const Eigen::MatrixXcd lhs = discrete_symbol(ab, lambda);
    const Eigen::MatrixXcd rhs = discrete_symbol(a, lambda) * discrete_symbol(b, lambda);
    EXPECT_LT((lhs - rhs).norm(), 1e-12 * (1.0 + rhs.norm()));
    EXPECT_LE(a.kernel_norm(discrete_symbol(a, lambda)), a.algebra_norm() * (1.0 + 1e-12));
  }
}

TEST_P(WienerAxioms, SmallFamiliesInvertAndMatchNeumann) {
  std::mt19937 rng(GetParam());
  // wide window: the inverse is not compactly supported, and its mass beyond
  // the window aliases back
  const LineGrid rho(16.0, 256);
  const auto t = random_family(rho, 3, 1.2, 0.01, rng);
  ASSERT_LT(t.algebra_norm(), 0.5);
  const auto inv = wiener_invert(t);
  EXPECT_LT(inv.left_residual, 1e-12);
  const double q = t.algebra_norm();
  EXPECT_LT(add(inv.s, neumann_series(t, 20), -1.0).algebra_norm(), 2.0 * std::pow(q, 21) / (1.0 - q) + 1e-13);
  EXPECT_LE(inv.norm, q / (1.0 - q) * (1.0 + 1e-9));
}

INSTANTIATE_TEST_SUITE_P(Seeds, WienerAxioms, ::testing::Values(1u, 2u, 3u, 4u, 5u));

TEST(Wiener, DiagnosticsTailDecreases) {
  RadialGrid g(6.0, 30);
  const auto t = build_t_minus(Potential::gaussian(0.5), g, LineGrid(25.6, 512));
  const auto d = wiener_diagnostics(t);
  for (std::size_t k = 1; k < d.tail.size(); ++k) EXPECT_LE(d.tail[k], d.tail[k - 1] + 1e-15);
  for (std::size_t k = 1; k < d.modulus.size(); ++k) EXPECT_GE(d.modulus[k], d.modulus[k - 1] - 1e-12);
  EXPECT_NEAR(d.tail.front(), t.algebra_norm(), 1e-12);
  EXPECT_FALSE(d.to_csv().empty());
}

TEST(Wiener, ScalarInverse) {
  const LineGrid rho(20.0, 1024);
  CplxVec f(rho.size());
  for (std::size_t m = 0; m < rho.size(); ++m) f[m] = 0.3 * std::exp(-rho.node(m) * rho.node(m));
  const auto w = scalar_wiener_check(f, rho);
  EXPECT_LT(w.residual, 1e-12);
  EXPECT_NEAR(w.min_symbol, 1.0, 1e-9);  // 1 + f^ >= 1 for this f
}

TEST(Wiener, ScalarZeroOfSymbolDetected) {
  // f^(0) = -c sqrt(pi) = -1
  const LineGrid rho(20.0, 1024);
  CplxVec f(rho.size());
  for (std::size_t m = 0; m < rho.size(); ++m) f[m] = -std::exp(-rho.node(m) * rho.node(m)) / std::sqrt(M_PI);
  try {
    scalar_wiener_check(f, rho);
    FAIL() << "expected NonInvertibleSymbol";
  } catch (const NonInvertibleSymbol& e) {
    EXPECT_NEAR(e.lambda(), 0.0, 1e-3);
  }
}
