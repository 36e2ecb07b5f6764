#include <gtest/gtest.h>

#include <cmath>

#include "scatlab/birman.hpp"
#include "scatlab/errors.hpp"

using namespace scatlab;

TEST(Birman, ResolventIdentity) {
  RadialGrid g(8.0, 160);
  const auto bs = assemble_bs(Potential::gaussian(0.8), g, 1.2, Branch::Plus, 0.0);
  const Eigen::MatrixXcd R = perturbed_resolvent(bs);
  const Eigen::MatrixXcd R0 = bs.kernel.psi_representation();
  EXPECT_LT((bs.system() * R - R0).norm() / R0.norm(), 1e-12);
}

TEST(Birman, InverseResidualSmall) {
  RadialGrid g(8.0, 160);
  const auto inv = invert_bs(assemble_bs(Potential::gaussian(0.5), g, 0.7, Branch::Minus, 0.0));
  EXPECT_LT(inv.residual, 1e-12);
  EXPECT_GT(inv.sigma_min, 0.1);
}

TEST(Birman, BranchesAreComplexConjugate) {
  // V real: R0(lambda^2 - i0) V is the conjugate of R0(lambda^2 + i0) V
  RadialGrid g(6.0, 80);
  const auto p = assemble_bs(Potential::gaussian(0.5), g, 1.0, Branch::Plus, 0.0);
  const auto m = assemble_bs(Potential::gaussian(0.5), g, 1.0, Branch::Minus, 0.0);
  EXPECT_LT((p.r0v - m.r0v.conjugate()).norm(), 1e-12);
}

TEST(Birman, BornSeriesAgreesForSmallPotential) {
  RadialGrid g(8.0, 120);
  const auto b = born_series_resolvent(Potential::gaussian(0.3), g, 1.0, 40);
  EXPECT_TRUE(b.convergent);
  ASSERT_TRUE(b.agreement.has_value());
  EXPECT_LT(*b.agreement, 1e-10);
}

TEST(Birman, BornSeriesDivergesNearResonance) {
  RadialGrid g(16.0, 128);
  const auto b = born_series_resolvent(Potential::aubin_talenti(1.0), g, 0.0, 30);
  EXPECT_FALSE(b.convergent);
}

TEST(Birman, ResonantZeroEnergyDetected) {
  RadialGrid g(16.0, 128);
  EXPECT_THROW(invert_bs_checked(Potential::aubin_talenti(1.0), g, 0.0, Branch::Plus, 0.0), SingularAtEnergy);
  EXPECT_NO_THROW(invert_bs_checked(Potential::gaussian(0.5), RadialGrid(8.0, 64), 0.0, Branch::Plus, 0.0));
}

TEST(Birman, ZeroEnergyReports) {
  const std::size_t levels[] = {64, 128, 256};
  const auto res = zero_energy_report(Potential::aubin_talenti(1.0), 16.0, levels);
  EXPECT_EQ(res.status, ZeroStatus::NonRegular);
  ASSERT_TRUE(res.null_residual.has_value());
  EXPECT_LT(*res.null_residual, 0.05);
  const auto reg = zero_energy_report(Potential::gaussian(0.5), 8.0, levels);
  EXPECT_EQ(reg.status, ZeroStatus::Regular);
  EXPECT_GT(reg.m00, 1.0);
}

TEST(Birman, SmallestSingularValueMatchesSvd) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(30, 30) + 3.0 * Eigen::MatrixXcd::Identity(30, 30);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  EXPECT_NEAR(smallest_singular_value(lu, 200), svd.singularValues().minCoeff(), 1e-8);
}
