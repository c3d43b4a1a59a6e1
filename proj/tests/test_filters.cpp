#include "statreg/filters.hpp"

#include "statreg/errors.hpp"
#include "statreg/noise_model.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace statreg;

namespace {

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  std::vector<double> out;
  const int steps = static_cast<int>(std::round(std::log10(hi / lo) * per_decade));
  for (int i = 0; i <= steps; ++i) out.push_back(lo * std::pow(10.0, static_cast<double>(i) / per_decade));
  return out;
}

Vector seeded_vector(int n, unsigned seed) {
  std::srand(seed);
  return Vector::Random(n);
}

}  // namespace

TEST(FilterValues, Tikhonov) {
  const Filter f = Filter::tikhonov();
  EXPECT_DOUBLE_EQ(filter_value(f, 0.5, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(bias_value(f, 1.0, 1.0), 0.5);
  EXPECT_NEAR(bias_value(f, 0.3, 1e-14), 1.0, 1e-12);
  EXPECT_EQ(f.gamma0(), 1.0);
  EXPECT_EQ(f.gamma_star(), 0.5);
  EXPECT_EQ(f.gamma(), 1.0);
}

TEST(FilterValues, SpectralCutoff) {
  const Filter f = Filter::spectral_cutoff();
  EXPECT_EQ(filter_value(f, 0.25, 0.25), 0.0);  // theta = alpha is excluded
  EXPECT_EQ(filter_value(f, 0.25, 0.1), 0.0);
  EXPECT_DOUBLE_EQ(filter_value(f, 0.25, 1.0), 1.0);
  EXPECT_EQ(bias_value(f, 0.25, 0.7), 0.0);
  EXPECT_EQ(bias_value(f, 0.3, 1e-14), 1.0);
  EXPECT_EQ(f.gain(0.01, 0.5), 1.0 / 0.5);
}

TEST(FilterValues, RejectsNonPositiveAlpha) {
  EXPECT_THROW(filter_value(Filter::tikhonov(), 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(parse_filter("landweber"), ConfigError);
}

TEST(FilterValues, BiasIdentityHoldsExactly) {
  for (const Filter& f : {Filter::tikhonov(), Filter::spectral_cutoff()}) {
    for (double alpha : {1e-6, 1e-3, 0.5}) {
      for (double theta : {0.0, 1e-7, 1e-3, 0.2, 0.4}) {
        EXPECT_EQ(theta * f.value(alpha, theta) + f.bias(alpha, theta), 1.0);
      }
    }
  }
}

TEST(FilterProperties, StandardFiltersPassOnIntegrationOperator) {
  const auto op = build_integration_operator(Grid(64));
  const auto alphas = log_grid(1e-6, 1.0, 4);
  for (const Filter& f : {Filter::tikhonov(), Filter::spectral_cutoff()}) {
    const FilterReport rep = verify_filter_properties(f, op, alphas);
    EXPECT_TRUE(rep.passed()) << f.name() << ": " << rep.violations.size() << " violations, first "
                              << (rep.violations.empty() ? "" : rep.violations.front().property);
    EXPECT_GT(rep.checks, 0);
  }
}

TEST(FilterProperties, TikhonovSupremumIsAttained) {
  // sup sqrt(theta)/(alpha+theta) = 1/(2 sqrt(alpha)) at theta = alpha.
  const Filter f = Filter::tikhonov();
  const double alpha = 1e-3;
  double sup = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double theta = std::pow(10.0, -8.0 + 8.0 * i / 100000.0);
    sup = std::max(sup, std::sqrt(theta) * f.value(alpha, theta));
  }
  EXPECT_NEAR(sup * std::sqrt(alpha), 0.5, 1e-6);
}

TEST(FilterProperties, ConstantFilterIsRejected) {
  const Filter bad = Filter::custom("constant", [](double alpha, double) { return 2.0 / alpha; }, 1.0, 1.0, 1.0);
  const auto op = build_integration_operator(Grid(32));
  const FilterReport rep = verify_filter_properties(bad, op, log_grid(1e-4, 1.0, 2));
  EXPECT_FALSE(rep.passed());
  EXPECT_TRUE(rep.violates("(2)"));
}

TEST(RegularizeSvd, ZeroData) {
  const auto op = build_integration_operator(Grid(16));
  EXPECT_EQ(regularize_svd(Filter::tikhonov(), op, Vector::Zero(16), 0.1).x_alpha.norm(), 0.0);
}

TEST(RegularizeSvd, CutoffBelowSmallestSingularValueIsPseudoinverse) {
  const auto op = build_integration_operator(Grid(16));
  const double s_min = op.singular_values()[15];
  const Vector y = seeded_vector(16, 1);
  const auto x = regularize_svd(Filter::spectral_cutoff(), op, y, 0.5 * s_min * s_min);
  const auto xp = generalized_inverse_apply(op, L2Vector(op.grid(), y));
  EXPECT_EQ(x.x_alpha.coeffs, xp.coeffs);  // identical gains give identical sums
}

TEST(RegularizeSvd, SingleTripleClosedForm) {
  const DiscreteOperator op(Grid(1), Matrix::Identity(1, 1));
  const auto x = regularize_svd(Filter::tikhonov(), op, Vector::Ones(1), 0.25);
  EXPECT_DOUBLE_EQ(std::abs(x.x_alpha.coeffs[0]), 1.0 / 1.25);
}

TEST(RegularizeSvd, Linearity) {
  const auto op = build_integration_operator(Grid(32));
  const Vector y1 = seeded_vector(32, 2), y2 = seeded_vector(32, 3);
  for (const Filter& f : {Filter::tikhonov(), Filter::spectral_cutoff()}) {
    const Vector lhs = regularize_svd(f, op, 2.0 * y1 - 3.0 * y2, 1e-3).x_alpha.coeffs;
    const Vector rhs = 2.0 * regularize_svd(f, op, y1, 1e-3).x_alpha.coeffs -
                       3.0 * regularize_svd(f, op, y2, 1e-3).x_alpha.coeffs;
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * std::max(1.0, lhs.norm()));
  }
}

TEST(RegularizeSvd, NormGrowsAsAlphaShrinks) {
  const auto op = build_integration_operator(Grid(64));
  const Vector y = seeded_vector(64, 4);
  double previous = 0.0;
  for (double alpha : {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    const double norm = regularize_svd(Filter::tikhonov(), op, y, alpha).x_alpha.norm();
    EXPECT_GE(norm, previous);
    previous = norm;
  }
}

TEST(NormalEquations, AgreesWithSpectralRoute) {
  const auto op = build_integration_operator(Grid(64));
  const Vector y = seeded_vector(64, 5);
  const auto a = regularize_svd(Filter::tikhonov(), op, y, 1e-3);
  const auto b = regularize_normal_equations(op, y, 1e-3);
  EXPECT_EQ(a.solver, SolverRoute::svd_series);
  EXPECT_EQ(b.solver, SolverRoute::normal_equations);
  EXPECT_LE((a.x_alpha.coeffs - b.x_alpha.coeffs).norm(), 1e-8 * a.x_alpha.norm());
}

TEST(NormalEquations, LargeAlphaLimit) {
  const auto op = build_integration_operator(Grid(16));
  const Vector y = seeded_vector(16, 6);
  const double alpha = 1e8;
  const Vector x = regularize_normal_equations(op, y, alpha).x_alpha.coeffs;
  const Vector approx = op.matrix().transpose() * y / alpha;
  EXPECT_LE((x - approx).norm(), 1e-6 * approx.norm());
  EXPECT_LT(x.norm(), regularize_normal_equations(op, y, 1e4).x_alpha.norm());
}

TEST(NormalEquations, TinyAlphaOnWellConditionedOperator) {
  Matrix m = Matrix::Identity(8, 8);
  m.diagonal() = Vector::LinSpaced(8, 1.0, 2.0);
  const DiscreteOperator op(Grid(8), m);
  const Vector x_true = seeded_vector(8, 7);
  const Vector x = regularize_normal_equations(op, m * x_true, 1e-12).x_alpha.coeffs;
  EXPECT_LE((x - x_true).norm(), 1e-4);
}

TEST(ConvergenceToPseudoinverse, TikhonovApproachesPseudoinverse) {
  // Source-type x = T*T w: the Tikhonov bias is alpha (alpha + T*T)^{-1} T*T w, at most alpha ||w||.
  const Grid g(16);
  const auto op = build_integration_operator(g);
  Vector w(16);
  for (int j = 1; j <= 16; ++j) w[j - 1] = std::sin(3.0 * g.midpoint(j)) / 4.0;
  const Vector y = op.matrix() * (op.gram() * w);
  const auto errs = convergence_to_pseudoinverse(Filter::tikhonov(), op, y, log_grid(1e-8, 1e-1, 1));
  const double ref = generalized_inverse_apply(op, L2Vector(g, y)).norm();
  EXPECT_LE(errs.front(), 1e-6 * ref);  // log_grid is ascending: front is alpha = 1e-8
  for (std::size_t i = 1; i < errs.size(); ++i) EXPECT_LE(errs[i - 1], errs[i]);
}

TEST(ConvergenceToPseudoinverse, CutoffIsExactBelowSmallestSingularValue) {
  const auto op = build_integration_operator(Grid(16));
  const double s_min = op.singular_values()[15];
  const Vector y = op.matrix() * seeded_vector(16, 8);
  const auto errs = convergence_to_pseudoinverse(Filter::spectral_cutoff(), op, y, {0.9 * s_min * s_min});
  EXPECT_EQ(errs.front(), 0.0);
  const auto zero = convergence_to_pseudoinverse(Filter::tikhonov(), op, Vector::Zero(16), {1e-1, 1e-3});
  EXPECT_EQ(zero[0], 0.0);
  EXPECT_EQ(zero[1], 0.0);
}

TEST(VarianceBound, MonteCarloVarianceBelowBound) {
  const auto op = build_integration_operator(Grid(64));
  for (const Filter& f : {Filter::tikhonov(), Filter::spectral_cutoff()}) {
    for (double alpha : {1e-3, 1e-2, 1e-1}) {
      double sum = 0.0;
      const int reps = 1000;
      for (int r = 0; r < reps; ++r) {
        const Vector xi = draw_noise(NoiseSpec::white(1, static_cast<std::uint64_t>(r)), op.grid());
        sum += regularize_svd(f, op, xi, alpha).x_alpha.norm_sq();
      }
      const double bound = f.gamma() * f.gamma() / (alpha * alpha) * op.hs_norm() * op.hs_norm();
      EXPECT_LE(sum / reps, bound) << f.name() << " alpha " << alpha;
    }
  }
}

TEST(FilterProperties, NonMonotoneBiasIsReported) {
  // Switches itself off for small alpha, so the bias jumps back to 1.
  const Filter bad = Filter::custom(
      "switch_off", [](double alpha, double theta) { return alpha > 1e-2 ? 1.0 / (alpha + theta) : 0.0; },
      1.0, 0.5, 1.0);
  const auto op = build_integration_operator(Grid(32));
  const FilterReport rep = verify_filter_properties(bad, op, log_grid(1e-4, 1.0, 2));
  EXPECT_TRUE(rep.violates("(1)"));
  EXPECT_FALSE(rep.violates("(2)"));
}
