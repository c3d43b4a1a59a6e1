#include "statreg/experiment.hpp"

#include "statreg/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace statreg;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite Gauss-Legendre (3 points) cell integrals of f against phi_j.
L2Vector quadrature_coefficients(const std::function<double(double)>& f, int n) {
  const double nodes[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const int sub = 64;
  Vector c(n);
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    const double h = 1.0 / (static_cast<double>(n) * sub);
    for (int k = 0; k < sub; ++k) {
      const double mid = (static_cast<double>(j) * sub + k + 0.5) * h;
      for (int q = 0; q < 3; ++q) sum += weights[q] * 0.5 * h * f(mid + 0.5 * h * nodes[q]);
    }
    c[j] = std::sqrt(static_cast<double>(n)) * sum;
  }
  return L2Vector(Grid(n), c);
}

double source_signal(double t, double nu) {
  double norm_sq = 0.0;
  for (int k = 1; k <= 32; ++k) norm_sq += 1.0 / (static_cast<double>(k) * k);
  double sum = 0.0;
  for (int k = 1; k <= 32; ++k) {
    const double w = (k - 0.5) * kPi;
    const double s = 1.0 / w;  // singular value of the integration operator
    sum += std::pow(s, 2.0 * nu) * (1.0 / k) / std::sqrt(norm_sq) * std::sqrt(2.0) * std::cos(w * t);
  }
  return sum;
}

ExperimentConfig small_config(Method method, int reps) {
  ExperimentConfig cfg;
  cfg.method = method;
  cfg.replicates = reps;
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST(TestSignal, CoefficientsMatchQuadrature) {
  const std::vector<std::pair<std::string, std::function<double(double)>>> cases = {
      {"smooth", [](double t) { return std::sin(kPi * t); }},
      {"rough", [](double t) { return t < 0.5 ? 1.0 : 0.0; }},
      {"source_half", [](double t) { return source_signal(t, 0.5); }},
      {"source_one", [](double t) { return source_signal(t, 1.0); }},
  };
  for (const auto& [name, f] : cases) {
    const TestSignal s = TestSignal::parse(name);
    const L2Vector exact = s.coefficients(Grid(32));
    const L2Vector quad = quadrature_coefficients(f, 32);
    EXPECT_LE((exact.coeffs - quad.coeffs).norm(), 1e-9) << name;
    // Norm of the projection approaches the analytic norm from below.
    const double fine = s.coefficients(Grid(8192)).norm_sq();
    EXPECT_LE(fine, s.norm_sq() + 1e-12) << name;
    EXPECT_NEAR(fine, s.norm_sq(), 1e-4) << name;
  }
  EXPECT_THROW(TestSignal::parse("wiggly"), ConfigError);
}

TEST(TestSignal, IntegratedCoefficientsMatchFineIntegration) {
  for (const std::string name : {"smooth", "rough", "source_half"}) {
    const TestSignal s = TestSignal::parse(name);
    const int fine = 16384;
    // Galerkin integration matrix on the fine grid, applied as a running sum.
    const Vector x = s.coefficients(Grid(fine)).coeffs;
    Vector y(fine);
    double running = 0.0;
    for (int i = 0; i < fine; ++i) {
      y[i] = (running + 0.5 * x[i]) / fine;
      running += x[i];
    }
    const L2Vector y_coarse = project(L2Vector(Grid(fine), y), 32);
    EXPECT_LE((y_coarse.coeffs - s.integrated_coefficients(Grid(32)).coeffs).norm(), 1e-7) << name;
  }
}

TEST(Problem, ErrorOfProjectionIsTheProjectionDefect) {
  const Problem problem(small_config(Method::oracle, 1));
  const L2Vector qx = problem.x_coefficients(16);
  const double expected = std::sqrt(0.5 - qx.norm_sq());
  EXPECT_NEAR(problem.error(qx), expected, 1e-14);
  EXPECT_NEAR(problem.error(L2Vector::zero(Grid(16))), std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(problem.norm_T_sq(), 4.0 / (kPi * kPi), 1e-3);
}

TEST(Problem, KernelOneMatchesIntegrationData) {
  ExperimentConfig cfg = small_config(Method::oracle, 1);
  cfg.op.kind = "kernel";
  cfg.op.kernel = "one";
  cfg.op.reference_n = 2048;
  cfg.schedule.n_max = 2048;
  const Problem kernel(cfg);
  const Problem integration(small_config(Method::oracle, 1));
  EXPECT_LE((kernel.exact_data(64).coeffs - integration.exact_data(64).coeffs).norm(), 1e-6);
  EXPECT_EQ(kernel.data_level(), 2048);
}

TEST(Realization, LevelsShareOneNoisePath) {
  const Problem problem(small_config(Method::oracle, 1));
  const Realization data = problem.realize(0.1, 5);
  const auto coarse = data.at(16);
  const auto fine = data.at(64);
  ASSERT_TRUE(coarse && fine);
  EXPECT_LE((project(*fine, 16).coeffs - coarse->coeffs).norm(), 1e-12);
  EXPECT_EQ(data.at(10)->grid.n_cells(), 16);
  EXPECT_FALSE(data.at(1 << 15).has_value());
  EXPECT_EQ(problem.realize(0.1, 5).at(32)->coeffs, data.at(32)->coeffs);
  EXPECT_THROW(problem.realize(0.0, 5), std::invalid_argument);
}

TEST(Realization, DiracNoiseHasRequestedNorm) {
  ExperimentConfig cfg = small_config(Method::discrepancy, 1);
  cfg.noise = NoiseKind::dirac;
  cfg.dirac_norm = 0.5;
  const Problem problem(cfg);
  const auto obs = problem.realize(0.2, 1).at(64);
  EXPECT_NEAR((obs->coeffs - obs->y_exact.coeffs).norm(), 0.2 * 0.5, 1e-14);
}

TEST(MseStudy, OracleErrorDecreasesAlongHalvings) {
  ExperimentConfig cfg = small_config(Method::oracle, 40);
  cfg.deltas = {0.1, 0.05, 0.025, 0.0125, 0.00625};
  const auto rows = run_mse_study(cfg);
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].mc_mse, rows[i - 1].mc_mse);
}

TEST(MseStudy, RowInvariants) {
  for (Method m : {Method::oracle, Method::lepskii_known_delta, Method::lepskii_estimated_delta}) {
    const auto rows = run_mse_study(small_config(m, 30));
    for (const auto& row : rows) {
      double sum = 0.0;
      for (double e : row.errors) sum += e * e;
      const double mean_sq = sum / row.rep_count;
      EXPECT_NEAR(row.mc_mse * row.mc_mse, mean_sq, 1e-12 * mean_sq);
      EXPECT_GE(row.mc_mse * row.mc_mse * (1.0 + 1e-12), row.mc_bias_sq);
      EXPECT_NEAR(row.mc_bias_sq + row.mc_variance, mean_sq, 1e-10);
      for (double rate : row.exceed_rate) {
        EXPECT_GE(rate, 0.0);
        EXPECT_LE(rate, 1.0);
      }
      const double eps = 2.0 * row.mc_mse;
      const auto above = std::count_if(row.errors.begin(), row.errors.end(), [&](double e) { return e > eps; });
      EXPECT_LE(static_cast<double>(above) / row.rep_count, 0.25);
    }
  }
}

TEST(MseStudy, SingleNoiselessReplicateHasNoVariance) {
  ExperimentConfig cfg = small_config(Method::discrepancy, 1);
  cfg.noise = NoiseKind::dirac;
  cfg.dirac_norm = 0.0;
  for (const auto& row : run_mse_study(cfg)) {
    EXPECT_EQ(row.mc_variance, 0.0);
    EXPECT_NEAR(row.mc_mse, std::sqrt(row.mc_bias_sq), 1e-12);
  }
}

TEST(MseStudy, DiscrepancyRejectsWhiteNoise) {
  EXPECT_THROW(run_mse_study(small_config(Method::discrepancy, 2)), UnsupportedNoiseError);
}

TEST(MseStudy, NoiseKindMayChangeAlongTheSequence) {
  ExperimentConfig cfg = small_config(Method::discrepancy, 4);
  cfg.noise_per_delta = {NoiseKind::dirac, NoiseKind::scaled_rv, NoiseKind::dirac, NoiseKind::scaled_rv};
  const auto rows = run_mse_study(cfg);
  EXPECT_EQ(rows.size(), 4u);
  cfg.noise_per_delta[2] = NoiseKind::gaussian_white;
  EXPECT_THROW(run_mse_study(cfg), UnsupportedNoiseError);
}

TEST(MseStudy, CsvIsDeterministic) {
  auto dump = [] {
    std::ostringstream out;
    write_mse_csv(run_mse_study(small_config(Method::lepskii_estimated_delta, 10)), out);
    return out.str();
  };
  const std::string a = dump();
  EXPECT_EQ(a, dump());
  EXPECT_EQ(a.rfind("delta,method,mc_mse", 0), 0u);
}

TEST(VetoStudy, ColumnsArePairedWithSingleMethodStudies) {
  ExperimentConfig cfg = small_config(Method::lepskii_estimated_delta, 12);
  const auto veto = run_veto_study(cfg);
  const auto est = run_mse_study(cfg);
  cfg.method = Method::lepskii_known_delta;
  const auto known = run_mse_study(cfg);
  cfg.method = Method::oracle;
  const auto oracle = run_mse_study(cfg);
  ASSERT_EQ(veto.size(), est.size());
  for (std::size_t i = 0; i < veto.size(); ++i) {
    EXPECT_EQ(veto[i].mse_estimated, est[i].mc_mse);
    EXPECT_EQ(veto[i].mse_known, known[i].mc_mse);
    EXPECT_EQ(veto[i].mse_oracle, oracle[i].mc_mse);
    EXPECT_DOUBLE_EQ(veto[i].ratio, est[i].mc_mse / known[i].mc_mse);
    EXPECT_GE(veto[i].hit_rate, 0.0);
    EXPECT_LE(veto[i].hit_rate, 1.0);
  }
  cfg.method = Method::oracle;
  EXPECT_THROW(run_veto_study(cfg), ConfigError);
}

TEST(BiasVariance, NoiselessCaseIsExact) {
  const auto op = build_integration_operator(Grid(64));
  const L2Vector x = TestSignal::parse("smooth").coefficients(op.grid());
  const auto rep = run_bias_variance_check(op, x, Filter::tikhonov(), 1e-2, 0.0, 20, 1);
  EXPECT_EQ(rep.mse_sq, rep.bias_sq);
  EXPECT_TRUE(rep.identity_holds());
}

TEST(BiasVariance, ZeroSignalIsPureVariance) {
  const auto op = build_integration_operator(Grid(64));
  const double delta = 0.05;
  const auto rep = run_bias_variance_check(op, L2Vector::zero(op.grid()), Filter::tikhonov(), 1e-2, delta, 500, 2);
  EXPECT_EQ(rep.bias_sq, 0.0);
  EXPECT_NEAR(rep.mse_sq, delta * delta * rep.v_hat, 1e-15);
  EXPECT_TRUE(rep.identity_holds());
  EXPECT_TRUE(rep.bound_respected());
}

TEST(BiasVariance, IdentityHoldsForSmoothSignal) {
  const auto op = build_integration_operator(Grid(128));
  const L2Vector x = TestSignal::parse("smooth").coefficients(op.grid());
  for (const Filter& f : {Filter::tikhonov(), Filter::spectral_cutoff()}) {
    const auto rep = run_bias_variance_check(op, x, f, 1e-2, 0.05, 1000, 3);
    EXPECT_TRUE(rep.identity_holds()) << f.name() << " discrepancy " << rep.discrepancy << " se " << rep.standard_error;
    EXPECT_TRUE(rep.bound_respected());
    EXPECT_GT(rep.standard_error, 0.0);
  }
}

TEST(Methods, ParseRoundTrip) {
  for (Method m : {Method::oracle, Method::discrepancy, Method::lepskii_known_delta, Method::lepskii_estimated_delta}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_method("gcv"), ConfigError);
}
