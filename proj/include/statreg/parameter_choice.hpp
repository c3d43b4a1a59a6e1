#pragma once

#include "statreg/discretization.hpp"
#include "statreg/filters.hpp"
#include "statreg/noise_estimator.hpp"
#include "statreg/noise_model.hpp"
#include "statreg/operator_model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace statreg {

struct OracleChoice {
  double alpha = 0.0;
  double error = 0.0;
};

/// Grid minimizer of the true error; ties go to the smallest alpha.
OracleChoice oracle_choice(const DiscreteOperator& op, const L2Vector& x_true, const Observation& obs,
                           const Filter& filter, const std::vector<double>& alpha_grid);

/// Same, with the error measured by a caller-supplied functional (e.g. against an
/// analytic solution rather than its projection).
OracleChoice oracle_choice(const DiscreteOperator& op,
                           const std::function<double(const L2Vector&)>& error_of,
                           const Observation& obs, const Filter& filter,
                           const std::vector<double>& alpha_grid);

struct DiscrepancyChoice {
  double alpha = 0.0;
  double residual = 0.0;
  /// False when no grid value met the residual test and the smallest alpha was returned.
  bool satisfied = true;
};

/// Largest grid alpha with ||T R_alpha y - y|| <= tau_dp * delta. Rejects white-noise data,
/// whose residual norm has no finite-dimension-independent meaning.
DiscrepancyChoice discrepancy_principle(const DiscreteOperator& op, const Observation& obs,
                                        const Filter& filter, double tau_dp,
                                        const std::vector<double>& alpha_grid);

/// Geometric grid alpha_j = delta^2 q^j, j = 0..m, m = ceil(2 log_q(||T||^2 / delta)) >= 1,
/// band constant kappa = sqrt(m), variance proxy Psi(j) = C_psi sqrt(n_j / (4 alpha_j)).
struct LepskiiConfig {
  double q = 2.0;
  double C_psi = 1.0;
  double norm_T_sq = 1.0;
  double delta_input = 0.0;

  void validate() const;
  int m() const;
  double kappa() const;
  double alpha(int j) const;
  std::vector<double> alpha_grid() const;
};

/// Optional oracle knowledge for the balancing diagnostic Phi(j) = C1 phi(C2 alpha_j).
struct BalancingModel {
  SourceCondition source;
  double C1 = 1.0;
  double C2 = 1.0;
};

struct LepskiiCandidate {
  double alpha = 0.0;
  int n = 0;
  double x_norm = 0.0;
  double psi = 0.0;
};

struct LepskiiResult {
  int j_star = 0;
  double alpha_star = 0.0;
  int m = 0;
  double kappa = 0.0;
  std::vector<LepskiiCandidate> candidates;
  int accepted_pairs_checked = 0;
  /// No j >= 1 passed; alpha_0 is used.
  bool degenerate = false;
  /// Largest j passing its own pairwise test, ignoring earlier failures (diagnostic).
  int unrestricted_j_star = 0;
  /// Balancing index max{j : Phi(j) <= delta Psi(j)} when a BalancingModel is given.
  std::optional<int> balancing_j;
  std::vector<L2Vector> iterates;
  L2Vector x_star = L2Vector::zero(Grid(1));

  std::vector<std::string> flags() const;
};

/// Balancing principle over Tikhonov solutions x_j = (alpha_j I + B^T B)^{-1} B^T Q_{n_j} Y,
/// n_j = level_of(alpha_j, delta). j_star is the last j before the first failure of
///   ||x_k - x_j|| <= 4 kappa delta Psi(k) for all k < j.
/// `obs` must be realized on a level at least as fine as every n_j.
LepskiiResult lepskii_choose(const OperatorLevels& ops, const Observation& obs,
                             const LepskiiConfig& cfg, const LevelSchedule& sched,
                             const std::optional<BalancingModel>& balancing = std::nullopt);

struct DataDrivenResult {
  NoiseEstimate estimate;
  LepskiiResult lepskii;
  L2Vector x_final = L2Vector::zero(Grid(1));
  /// Set when the noise-level refinement did not converge.
  bool estimate_flagged = false;
};

/// Lepskii choice with delta replaced by a given noise-level estimate.
DataDrivenResult lepskii_with_estimate(const OperatorLevels& ops, const DataSource& raw_data,
                                       const NoiseEstimate& estimate,
                                       const LepskiiConfig& lepskii_template,
                                       const LevelSchedule& sched);

/// Fully data-driven choice: refine delta_hat from the data, then run the balancing
/// principle with delta_input = delta_hat.
DataDrivenResult data_driven_choose(const OperatorLevels& ops, const DataSource& raw_data,
                                    const EstimatorConfig& est_cfg,
                                    const LepskiiConfig& lepskii_template,
                                    const LevelSchedule& sched);

}  // namespace statreg
