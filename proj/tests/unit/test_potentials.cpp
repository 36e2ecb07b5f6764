#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "scatlab/errors.hpp"
#include "scatlab/numerics.hpp"
#include "scatlab/potentials.hpp"

using namespace scatlab;

namespace {
// 3D Fourier transform of a radial profile by the Bessel reduction, test-only.
double radial_fourier(const Potential& v, double xi, double r_max) {
  return 4.0 * M_PI * integrate([&](double r) {
           return v(r) * r * (xi == 0.0 ? r : std::sin(xi * r) / xi);
         }, 0.0, r_max, 400);
}
}  // namespace

TEST(Potentials, GaussianKatoNormIsTwoPi) {
  // sup attained at the origin: 4 pi \int r e^{-r^2} dr
  const auto k = kato_norm(Potential::gaussian(1.0));
  EXPECT_NEAR(k.value, 2.0 * M_PI, 1e-8);
  EXPECT_LT(k.argmax, 0.1);
}

TEST(Potentials, KatoNormScalesWithAmplitudeAndScale) {
  // |V|_K for A e^{-r^2/s^2} is 2 pi A s^2
  EXPECT_NEAR(kato_norm(Potential::gaussian(0.3, 2.0)).value, 2.0 * M_PI * 0.3 * 4.0, 1e-7);
}

TEST(Potentials, ClosedFormFourierMatchesQuadrature) {
  for (auto v : {Potential::gaussian(0.7, 1.3), Potential::yukawa(0.4, 0.8)}) {
    ASSERT_TRUE(v.has_closed_form_fourier());
    for (double xi : {0.0, 0.5, 1.7, 4.0}) {
      const double r_max = v.kind() == PotentialKind::Yukawa ? 60.0 : 12.0;
      EXPECT_NEAR(v.fourier(xi), radial_fourier(v, xi, r_max), 1e-6 * (1.0 + std::abs(v.fourier(0.0))))
          << v.name() << " xi=" << xi;
    }
  }
}

TEST(Potentials, GaussianFourierFrozen) {
  EXPECT_NEAR(Potential::gaussian(1.0).fourier(0.0), 5.568327996831708, 1e-12);
  EXPECT_NEAR(Potential::gaussian(1.0).fourier(2.0), 2.0484733917337454, 1e-12);
}

TEST(Potentials, AubinTalentiResonanceSolvesZeroEnergyEquation) {
  // psi'' + 2 psi' / r = V psi with V = -5 W^4
  for (double lam : {1.0, 2.0}) {
    const auto v = Potential::aubin_talenti(lam);
    const double d = 1e-4;
    for (double r : {0.3, 1.0, 2.5, 7.0}) {
      auto p = [&](double x) { return aubin_talenti_resonance(x, lam); };
      const double lap = (p(r + d) - 2 * p(r) + p(r - d)) / (d * d) + (p(r + d) - p(r - d)) / (d * r);
      EXPECT_NEAR(lap, v(r) * p(r), 1e-5 * (1.0 + std::abs(v(r) * p(r)))) << "r=" << r;
    }
  }
}

TEST(Potentials, AubinTalentiResonanceNotL2) {
  // psi ~ -sqrt(3) / (2 lambda r) at infinity: a resonance, not an eigenfunction
  for (double lam : {1.0, 2.0})
    EXPECT_NEAR(aubin_talenti_resonance(1e4, lam) * 1e4 * lam, -std::sqrt(3.0) / 2.0, 1e-3);
}

TEST(Potentials, TableRoundTripsCsv) {
  std::istringstream in("r,v\n0,1\n1,0.5\n2,0.25\n3,0\n");
  const auto v = Potential::load_csv(in);
  EXPECT_NEAR(v(1.0), 0.5, 1e-12);
  EXPECT_NEAR(v(10.0), 0.0, 1e-12);
}

TEST(Potentials, BadInputsThrow) {
  EXPECT_THROW(Potential::gaussian(1.0, -1.0), InvalidArgument);
  std::istringstream bad("r,v\n0,abc\n");
  EXPECT_ANY_THROW(Potential::load_csv(bad));
}

TEST(Potentials, ScaledAndZero) {
  const auto v = Potential::gaussian(0.5).scaled(-2.0);
  EXPECT_NEAR(v(0.0), -1.0, 1e-15);
  EXPECT_TRUE(Potential::zero().is_zero());
}
