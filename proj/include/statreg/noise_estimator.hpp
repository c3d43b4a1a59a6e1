#pragma once

#include "statreg/discretization.hpp"
#include "statreg/noise_model.hpp"
#include "statreg/operator_model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace statreg {

struct NoiseEstimate {
  double delta_tilde_sq = 0.0;
  double delta_hat = 0.0;  ///< tau * sqrt(delta_tilde_sq)
  int n_used = 0;
  double tau = 1.5;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  ///< delta_hat after each pass
};

struct EstimatorConfig {
  double tau = 1.5;
  double K = 3.0;
  double p = 2.0;
  double eps = 0.1;
  int m_window = 3;
  int n_init = 16;
  int max_iterations = 50;

  void validate() const;
};

/// First-difference estimator (1/(2n^2)) sum_{j=1}^{n-1} (v_{j+1} - v_j)^2 over the
/// cell values v_j = sqrt(n) Y_{delta,j}.
double estimate_delta_sq(const Observation& obs);

/// Supplies the same underlying data at level n (or a nested finer level the source
/// prefers); std::nullopt when the level is out of reach.
using DataSource = std::function<std::optional<Observation>(int n)>;

/// Fixed-point refinement: estimate at level n, move to max(n(dh^2, dh), p n) and stop
/// once the last m_window estimates agree to eps * dh. Gives up (converged = false) when
/// the next level would exceed n_max, the source runs dry, or max_iterations passes.
NoiseEstimate refine_delta_hat(const DataSource& raw_data, const EstimatorConfig& cfg,
                               const LevelSchedule& sched);

struct ConcentrationReport {
  double delta_true = 0.0;
  double K = 0.0;
  double tau = 0.0;
  int n = 0;
  double hit_rate = 0.0;  ///< empirical P(delta_hat in [delta, K tau delta])
  int replicates = 0;
};

/// Empirical frequency of the event delta <= tau * tilde_delta_n <= K tau delta.
/// `noise` is a template; replicate r uses stream r.
ConcentrationReport omega_plus_rate(const DiscreteOperator& op, const L2Vector& x_true, double delta,
                                    double tau, double K, int replicates, std::uint64_t seed,
                                    const std::optional<NoiseSpec>& noise = std::nullopt);

}  // namespace statreg
