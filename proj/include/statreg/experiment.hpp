#pragma once

#include "statreg/config.hpp"
#include "statreg/discretization.hpp"
#include "statreg/filters.hpp"
#include "statreg/noise_estimator.hpp"
#include "statreg/noise_model.hpp"
#include "statreg/operator_model.hpp"
#include "statreg/parameter_choice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace statreg {

enum class Method { oracle, discrepancy, lepskii_known_delta, lepskii_estimated_delta };

std::string to_string(Method method);
Method parse_method(const std::string& name);

/// Exact test solutions with closed-form cell integrals of x and of int_0^t x.
///   smooth       sin(pi t)
///   source_half  (T*T)^{1/2} v,  v = sum_k c_k v_k, c_k ~ 1/k, ||v|| = 1
///   source_one   (T*T)^{1}   v
///   rough        indicator of [0, 1/2)
/// v_k(t) = sqrt(2) cos((k - 1/2) pi t) are the right singular functions of the
/// integration operator, so the source-type signals are built spectrally.
class TestSignal {
 public:
  static TestSignal parse(const std::string& name);

  const std::string& name() const { return name_; }
  double norm_sq() const;
  /// <x, phi_j> for every cell.
  L2Vector coefficients(const Grid& grid) const;
  /// <Tx, phi_j> for the integration operator T.
  L2Vector integrated_coefficients(const Grid& grid) const;

 private:
  enum class Shape { smooth, source, rough };

  double first_primitive(double t) const;   // int_0^t x
  double second_primitive(double t) const;  // int_0^t int_0^s x

  std::string name_;
  Shape shape_ = Shape::smooth;
  std::vector<double> spectral_coeffs_;  // coefficients of x against v_k
};

struct OperatorSpec {
  std::string kind = "integration";  ///< integration | kernel
  std::string kernel = "one";        ///< one | min | exp  (kernel operators only)
  KernelSupport support = KernelSupport::volterra;
  double holder_s = 1.0;
  int reference_n = 2048;  ///< data grid for kernel operators
};

struct ExperimentConfig {
  OperatorSpec op;
  std::string signal = "smooth";
  std::vector<double> deltas = {0.1, 0.05, 0.02, 0.01};
  NoiseKind noise = NoiseKind::gaussian_white;
  /// Optional noise kind per entry of `deltas`; lets the distribution change along the
  /// sequence. Empty means `noise` everywhere.
  std::vector<NoiseKind> noise_per_delta;
  double dirac_norm = 1.0;
  int replicates = 200;
  std::uint64_t seed = 20240601;
  Method method = Method::lepskii_estimated_delta;
  std::string filter = "tikhonov";
  LevelSchedule schedule;
  EstimatorConfig estimator;
  double lepskii_q = 2.0;
  double lepskii_C_psi = 1.0;
  double tau_dp = 2.0;
  int simulate_n = 64;
  double simulate_delta = 0.05;
  std::string output;

  static ExperimentConfig from_flat(const FlatConfig& flat);
  static ExperimentConfig load(const std::string& path);
  NoiseKind noise_at(std::size_t delta_index) const;
  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

class Problem;

/// One noise path at noise level delta, realized once on the finest data grid and
/// projected to whatever level is requested.
class Realization {
 public:
  /// Observation at the dyadic level >= n; nullopt when beyond the data grid.
  std::optional<Observation> at(int n) const;
  DataSource source() const;
  double delta() const { return delta_; }
  NoiseKind noise() const { return kind_; }

 private:
  friend class Problem;
  Realization(const Problem* problem, double delta, NoiseKind kind, std::uint64_t seed,
              std::uint64_t stream);

  const Problem* problem_;
  double delta_;
  NoiseKind kind_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  Vector fine_noise_;  // white noise only
};

/// Operator, exact solution and exact data of one experiment.
class Problem {
 public:
  explicit Problem(const ExperimentConfig& cfg);

  const ExperimentConfig& config() const { return cfg_; }
  const OperatorLevels& levels() const { return *levels_; }
  int data_level() const { return data_level_; }
  double norm_T_sq() const { return norm_T_sq_; }
  double x_norm() const;

  L2Vector exact_data(int n) const;
  L2Vector x_coefficients(int n) const;
  /// ||x_true - x_h|| for a piecewise-constant x_h, exact up to rounding.
  double error(const L2Vector& x_h) const;

  Realization realize(double delta, std::uint64_t stream) const;
  Realization realize(double delta, NoiseKind kind, std::uint64_t stream) const;

 private:
  friend class Realization;

  ExperimentConfig cfg_;
  TestSignal signal_;
  std::unique_ptr<OperatorLevels> levels_;
  int data_level_ = 0;
  L2Vector fine_data_ = L2Vector::zero(Grid(1));
  double norm_T_sq_ = 0.0;
};

/// Stream id of replicate r at noise level index k; shared by every method so that
/// comparisons across methods are paired.
std::uint64_t replicate_stream(std::size_t delta_index, int replicate);

struct MethodOutcome {
  L2Vector x = L2Vector::zero(Grid(1));
  double alpha = 0.0;
  double error = 0.0;
  double delta_hat = 0.0;
  bool flagged = false;
  int j_star = -1;
  int m = 0;
};

/// Applies one parameter-choice method to one realization.
MethodOutcome run_method(const Problem& problem, const Realization& data, Method method);

struct MseRow {
  double delta = 0.0;
  Method method = Method::oracle;
  double mc_mse = 0.0;  ///< root mean square error
  double mc_bias_sq = 0.0;
  double mc_variance = 0.0;
  int rep_count = 0;
  std::vector<double> eps_grid;     ///< absolute thresholds
  std::vector<double> exceed_rate;  ///< empirical P(error > eps)
  double mean_alpha = 0.0;
  int flagged = 0;
  std::vector<double> errors;  ///< per replicate, not exported
};

std::vector<MseRow> run_mse_study(const ExperimentConfig& cfg);
void write_mse_csv(const std::vector<MseRow>& rows, std::ostream& out);

struct VetoRow {
  double delta = 0.0;
  int m = 0;
  double mse_oracle = 0.0;
  double mse_known = 0.0;
  double mse_estimated = 0.0;
  double ratio = 0.0;  ///< mse_estimated / mse_known
  double hit_rate = 0.0;
  double mean_delta_hat = 0.0;
  double nonconverged_rate = 0.0;
  int degenerate_known = 0;
  int degenerate_estimated = 0;
  int rep_count = 0;
};

/// Paired comparison of oracle, known-delta Lepskii and fully data-driven choice.
std::vector<VetoRow> run_veto_study(const ExperimentConfig& cfg);
void write_veto_csv(const std::vector<VetoRow>& rows, std::ostream& out);

struct BiasVarianceReport {
  double mse_sq = 0.0;    ///< mean ||x_true - R_alpha Y||^2
  double bias_sq = 0.0;   ///< ||x_true - R_alpha y||^2, noiseless
  double v_hat = 0.0;     ///< mean ||R_alpha Xi||^2
  double discrepancy = 0.0;  ///< mse_sq - bias_sq - delta^2 v_hat
  double standard_error = 0.0;
  double variance_bound = 0.0;  ///< gamma^2 / alpha^2 ||T||_HS^2
  int replicates = 0;

  /// Four standard errors, floored at rounding level for exactly cancelling designs.
  bool identity_holds() const {
    return std::abs(discrepancy) <= 4.0 * standard_error + 1e-12 * std::max(mse_sq, 1e-300);
  }
  bool bound_respected() const { return v_hat <= variance_bound; }
};

/// Monte Carlo check of the bias-variance decomposition under white noise. The
/// standard error is that of the paired per-replicate difference.
BiasVarianceReport run_bias_variance_check(const DiscreteOperator& op, const L2Vector& x_true,
                                           const Filter& filter, double alpha, double delta,
                                           int replicates, std::uint64_t seed);

}  // namespace statreg
