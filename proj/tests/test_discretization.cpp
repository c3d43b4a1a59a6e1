#include "statreg/discretization.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace statreg;

TEST(LevelSchedule, Examples) {
  const LevelSchedule s;  // r = eta = c1 = c2 = 1
  EXPECT_EQ(n_of(1e-4, 1e-1, s), 100);
  EXPECT_EQ(n_of(1.0, 1.0, s), 1);
  LevelSchedule alpha_only = s;
  alpha_only.c2 = 0.0;
  EXPECT_EQ(n_of(1e-4, 1e-3, alpha_only), 100);
}

TEST(LevelSchedule, MonotoneInDelta) {
  const LevelSchedule s;
  for (double alpha : {1e-1, 1e-3, 1e-5}) {
    int previous = 0;
    for (double delta = 0.5; delta > 1e-4; delta /= 2.0) {
      const int n = n_of(alpha, delta, s);
      EXPECT_GE(n, previous);
      previous = n;
    }
  }
}

TEST(LevelSchedule, CapAndValidation) {
  LevelSchedule s;
  s.n_max = 64;
  EXPECT_EQ(n_of(1e-8, 0.5, s), 64);
  EXPECT_EQ(n_of_uncapped(1e-8, 0.5, s), 10000);
  LevelSchedule bad;
  bad.eta = 2.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad.eta = 0.5;  // below 2/(1+2r) for r = 1
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_NO_THROW(LevelSchedule::for_holder(0.75).validate());
  EXPECT_DOUBLE_EQ(LevelSchedule::for_holder(0.75).eta, 1.0 / 0.75);
}

TEST(LevelSchedule, NoiseEnergyAtFinestLevelGrows) {
  // n(alpha_0, delta)^2 delta^2 with alpha_0 = delta^2 grows along delta -> 0 once eta = 1/s > 1.
  const LevelSchedule s = LevelSchedule::for_holder(0.75);
  double previous = 0.0;
  for (double delta : {1e-1, 1e-2, 1e-3}) {
    const double n = static_cast<double>(n_of_uncapped(delta * delta, delta, s));
    EXPECT_GT(n * n * delta * delta, previous);
    previous = n * n * delta * delta;
  }
}

TEST(LevelSchedule, NoiseEnergyAtFinestLevelIsFlatForLipschitzData) {
  // Boundary case s = 1: n = ceil(1/delta), so the product stays at 1 instead of growing.
  const LevelSchedule s = LevelSchedule::for_holder(1.0);
  for (double delta : {1e-1, 1e-2, 1e-3}) {
    const double n = static_cast<double>(n_of_uncapped(delta * delta, delta, s));
    EXPECT_NEAR(n * n * delta * delta, 1.0, 1e-9);
  }
}

TEST(DyadicLevel, RoundsUpToPowerOfTwo) {
  EXPECT_EQ(dyadic_level(1), 1);
  EXPECT_EQ(dyadic_level(10), 16);
  EXPECT_EQ(dyadic_level(64), 64);
  EXPECT_EQ(level_of(1e-2, 1e-1, LevelSchedule{}), 16);
  EXPECT_THROW(dyadic_level(0), std::invalid_argument);
}

TEST(Project, IdentityAndConstants) {
  const Grid fine(32);
  const L2Vector f(fine, Vector::LinSpaced(32, -1.0, 2.0));
  EXPECT_EQ(project(f, 32).coeffs, f.coeffs);
  const L2Vector one = from_cell_values(fine, Vector::Ones(32));
  const Vector coarse_values = cell_values(project(one, 4));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(coarse_values[i], 1.0, 1e-15);
  EXPECT_THROW(project(f, 5), std::invalid_argument);
}

TEST(Project, OrthogonalProjectionLaws) {
  std::srand(3);
  const Grid fine(64);
  const L2Vector y(fine, Vector::Random(64));
  const L2Vector z(fine, Vector::Random(64));
  const L2Vector qy = project(y, 8);
  const L2Vector qy_fine = prolongate(qy, fine);
  // Pythagoras
  EXPECT_NEAR(qy.norm_sq() + (y.coeffs - qy_fine.coeffs).squaredNorm(), y.norm_sq(), 1e-12);
  // Idempotence
  EXPECT_LE((project(qy_fine, 8).coeffs - qy.coeffs).norm(), 1e-12);
  // Symmetry
  const double a = qy_fine.coeffs.dot(z.coeffs);
  const double b = y.coeffs.dot(prolongate(project(z, 8), fine).coeffs);
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(Project, ProjectedWhiteNoiseStaysWhite) {
  const Grid fine(1024);
  const int reps = 2000;
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const Vector xi = draw_noise(NoiseSpec::white(4, static_cast<std::uint64_t>(r)), fine);
    const double c = project(L2Vector(fine, xi), 16).coeffs[3];
    sum += c;
    sum_sq += c * c;
  }
  EXPECT_NEAR(sum / reps, 0.0, 4.0 / std::sqrt(reps));
  EXPECT_NEAR(sum_sq / reps, 1.0, 4.0 * std::sqrt(2.0 / reps));
}

TEST(Project, ObservationKeepsMetadata) {
  const Grid fine(16);
  const Observation obs = observe_data(L2Vector(fine, Vector::Ones(16)), 0.1, NoiseSpec::white(9, 2));
  const Observation q = project(obs, 4);
  EXPECT_EQ(q.grid.n_cells(), 4);
  EXPECT_EQ(q.delta, 0.1);
  EXPECT_EQ(q.noise.stream, 2u);
  EXPECT_LE((q.y_exact.coeffs - Vector::Constant(4, 2.0)).norm(), 1e-14);
}
