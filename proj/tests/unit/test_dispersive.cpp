#include <gtest/gtest.h>

#include <cmath>

#include "scatlab/dispersive.hpp"
#include "scatlab/errors.hpp"

using namespace scatlab;

TEST(Evolve, FreeGaussianSupNormClosedForm) {
  // |e^{it Delta} e^{-r^2/2}|_inf = (1 + 4 t^2)^{-3/4}
  const double times[] = {0.0, 1.0, 3.0};
  EvolveOptions o;
  o.r_max = 60.0;
  o.spacing = 0.02;  // the sup is sampled at r = h/2
  const auto run = evolve(Potential::zero(), RadialDatum::gaussian(1.0), times, o);
  for (std::size_t k = 0; k < 3; ++k)
    EXPECT_NEAR(run.sup_norm[k], std::pow(1.0 + 4.0 * times[k] * times[k], -0.75), 1e-4) << times[k];
  EXPECT_LT(run.max_l2_drift, 1e-10);
}

TEST(Evolve, ProjectsBoundStates) {
  const double times[] = {0.0, 1.0};
  const auto run = evolve(Potential::gaussian(-6.0), RadialDatum::gaussian(1.0), times);
  EXPECT_TRUE(run.projected);
  EXPECT_GE(run.bound_states_removed, 1u);
  EXPECT_GT(run.removed_mass, 0.0);
  EXPECT_LT(run.removed_mass, 1.0);
}

TEST(Evolve, KinematicGridGrowsWithHorizon) {
  const auto f = RadialDatum::gaussian(1.0);
  EXPECT_GT(kinematic_grid(Potential::zero(), f, 100.0, 0.1).r_max(),
            kinematic_grid(Potential::zero(), f, 10.0, 0.1).r_max());
}

TEST(Nls, SmallDataConvergesAndConservesMass) {
  auto psi0 = [](double x) { return cplx(0.07 * std::exp(-x * x / 2.0)); };
  for (auto sign : {NlsSign::Defocusing, NlsSign::Focusing}) {
    const auto run = nls_small_data(psi0, sign, 2.0);
    EXPECT_TRUE(run.converged);
    EXPECT_LT(run.contraction, 0.5);
    for (double m : run.mass) EXPECT_NEAR(m, run.mass.front(), 1e-8 * run.mass.front());
    ASSERT_TRUE(run.direct_difference.has_value());
    EXPECT_LT(*run.direct_difference, 1e-4);
  }
}

TEST(Nls, SolversAgreeOnTheNonlinearCorrection) {
  // at the small-data mass bound the two solvers must agree on psi(T) - free flow,
  // not only on psi(T)
  auto psi0 = [](double x) { return cplx(0.075 * std::exp(-x * x / 2.0)); };
  const auto run = nls_small_data(psi0, NlsSign::Focusing, 2.0);
  ASSERT_GT(run.nonlinear_effect, 1e-7);
  EXPECT_LT(*run.direct_difference / run.nonlinear_effect, 1e-3);
}

TEST(Nls, LinearLimit) {
  // tiny data: the fixed point is the free flow
  auto psi0 = [](double x) { return cplx(1e-4 * std::exp(-x * x / 2.0)); };
  const auto run = nls_small_data(psi0, NlsSign::Defocusing, 1.0);
  EXPECT_LE(run.iterate_l6.size(), 4u);
}

TEST(Nls, RejectsLargeData) {
  auto psi0 = [](double x) { return cplx(3.0 * std::exp(-x * x / 2.0)); };
  EXPECT_ANY_THROW(nls_small_data(psi0, NlsSign::Focusing, 1.0));
}
