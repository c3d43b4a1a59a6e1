#include "statreg/noise_estimator.hpp"

#include "statreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace statreg {

void EstimatorConfig::validate() const {
  if (!(tau > 1.0)) throw std::invalid_argument("estimator: tau must exceed 1");
  if (!(K > 1.0)) throw std::invalid_argument("estimator: K must exceed 1");
  if (!(p > 1.0)) throw std::invalid_argument("estimator: p must exceed 1");
  if (!(eps > 0.0)) throw std::invalid_argument("estimator: eps must be positive");
  if (m_window < 1) throw std::invalid_argument("estimator: m_window must be at least 1");
  if (n_init < 2) throw std::invalid_argument("estimator: n_init must be at least 2");
  if (max_iterations < 1) throw std::invalid_argument("estimator: max_iterations must be positive");
}

double estimate_delta_sq(const Observation& obs) {
  const int n = obs.grid.n_cells();
  if (n < 2) throw std::invalid_argument("noise estimation needs at least two cells");
  const Vector v = pointwise_values(obs);
  const double sum = (v.tail(n - 1) - v.head(n - 1)).squaredNorm();
  return sum / (2.0 * static_cast<double>(n) * static_cast<double>(n));
}

NoiseEstimate refine_delta_hat(const DataSource& raw_data, const EstimatorConfig& cfg,
                               const LevelSchedule& sched) {
  cfg.validate();
  NoiseEstimate est;
  est.tau = cfg.tau;

  int n = cfg.n_init;
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    const std::optional<Observation> obs = raw_data(n);
    if (!obs) {
      if (k == 1) throw NumericalError("data source cannot supply the initial level");
      break;
    }
    est.iterations = k;
    est.n_used = obs->grid.n_cells();
    est.delta_tilde_sq = estimate_delta_sq(*obs);
    est.delta_hat = cfg.tau * std::sqrt(est.delta_tilde_sq);
    est.history.push_back(est.delta_hat);

    if (k >= cfg.m_window) {
      const auto window_begin = est.history.end() - cfg.m_window;
      double spread = 0.0;
      for (auto it = window_begin; it != est.history.end(); ++it) {
        spread = std::max(spread, std::abs(est.delta_hat - *it));
      }
      if (spread <= cfg.eps * est.delta_hat) {
        est.converged = true;
        break;
      }
    }

    if (!(est.delta_hat > 0.0)) break;  // n(alpha, 0) is unbounded
    const double alpha = est.delta_hat * est.delta_hat;
    const long long grown = static_cast<long long>(std::ceil(cfg.p * est.n_used));
    const long long next = std::max(n_of_uncapped(alpha, est.delta_hat, sched), grown);
    if (next > sched.n_max) break;
    n = static_cast<int>(next);
  }
  return est;
}

ConcentrationReport omega_plus_rate(const DiscreteOperator& op, const L2Vector& x_true, double delta,
                                    double tau, double K, int replicates, std::uint64_t seed,
                                    const std::optional<NoiseSpec>& noise) {
  if (replicates < 1) throw std::invalid_argument("omega_plus_rate needs at least one replicate");
  const L2Vector y = apply(op, x_true);
  int hits = 0;
  for (int r = 0; r < replicates; ++r) {
    NoiseSpec spec = noise.value_or(NoiseSpec::white(seed));
    spec.seed = seed;
    spec.stream = static_cast<std::uint64_t>(r);
    const Observation obs = observe_data(y, delta, spec);
    const double delta_hat = tau * std::sqrt(estimate_delta_sq(obs));
    if (delta_hat >= delta && delta_hat <= K * tau * delta) ++hits;
  }
  return {delta, K, tau, op.size(), static_cast<double>(hits) / replicates, replicates};
}

}  // namespace statreg
