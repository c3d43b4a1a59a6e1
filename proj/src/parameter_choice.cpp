#include "statreg/parameter_choice.hpp"

#include "statreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace statreg {

OracleChoice oracle_choice(const DiscreteOperator& op,
                           const std::function<double(const L2Vector&)>& error_of,
                           const Observation& obs, const Filter& filter,
                           const std::vector<double>& alpha_grid) {
  if (alpha_grid.empty()) throw std::invalid_argument("oracle choice: empty alpha grid");
  if (!(obs.grid == op.grid())) throw std::invalid_argument("oracle choice: grid mismatch");
  std::vector<double> alphas = alpha_grid;
  std::sort(alphas.begin(), alphas.end());
  OracleChoice best{alphas.front(), std::numeric_limits<double>::infinity()};
  for (double alpha : alphas) {
    const double err = error_of(regularize_svd(filter, op, obs.coeffs, alpha).x_alpha);
    if (err < best.error) best = {alpha, err};
  }
  return best;
}

OracleChoice oracle_choice(const DiscreteOperator& op, const L2Vector& x_true, const Observation& obs,
                           const Filter& filter, const std::vector<double>& alpha_grid) {
  return oracle_choice(
      op, [&](const L2Vector& x) { return l2_distance(x, x_true); }, obs, filter, alpha_grid);
}

DiscrepancyChoice discrepancy_principle(const DiscreteOperator& op, const Observation& obs,
                                        const Filter& filter, double tau_dp,
                                        const std::vector<double>& alpha_grid) {
  if (obs.noise.kind == NoiseKind::gaussian_white) {
    throw UnsupportedNoiseError(
        "discrepancy principle rejected: observations with white noise have no finite "
        "residual norm in the continuum model; use dirac or scaled_rv noise");
  }
  if (!(tau_dp > 1.0)) throw std::invalid_argument("discrepancy principle needs tau_dp > 1");
  if (alpha_grid.empty()) throw std::invalid_argument("discrepancy principle: empty alpha grid");
  if (!(obs.grid == op.grid())) throw std::invalid_argument("discrepancy principle: grid mismatch");

  std::vector<double> alphas = alpha_grid;
  std::sort(alphas.begin(), alphas.end(), std::greater<>());
  const double threshold = tau_dp * obs.delta;
  for (double alpha : alphas) {
    const double residual = regularize_svd(filter, op, obs.coeffs, alpha).residual_norm;
    if (residual <= threshold) return {alpha, residual, true};
  }
  const double smallest = alphas.back();
  return {smallest, regularize_svd(filter, op, obs.coeffs, smallest).residual_norm, false};
}

void LepskiiConfig::validate() const {
  if (!(q > 1.0)) throw std::invalid_argument("lepskii: q must exceed 1");
  if (!(C_psi > 0.0)) throw std::invalid_argument("lepskii: C_psi must be positive");
  if (!(norm_T_sq > 0.0)) throw std::invalid_argument("lepskii: ||T||^2 must be positive");
  if (!(delta_input > 0.0)) throw std::invalid_argument("lepskii: delta must be positive");
}

int LepskiiConfig::m() const {
  validate();
  const double raw = 2.0 * std::log(norm_T_sq / delta_input) / std::log(q);
  return std::max(1, static_cast<int>(std::ceil(raw * (1.0 - 1e-12))));
}

double LepskiiConfig::kappa() const { return std::sqrt(static_cast<double>(m())); }

std::vector<double> LepskiiConfig::alpha_grid() const {
  const int count = m();
  std::vector<double> grid(static_cast<std::size_t>(count) + 1);
  grid[0] = delta_input * delta_input;
  for (std::size_t j = 1; j < grid.size(); ++j) grid[j] = grid[j - 1] * q;
  return grid;
}

double LepskiiConfig::alpha(int j) const {
  const auto grid = alpha_grid();
  if (j < 0 || j >= static_cast<int>(grid.size())) throw std::out_of_range("lepskii grid index");
  return grid[static_cast<std::size_t>(j)];
}

std::vector<std::string> LepskiiResult::flags() const {
  std::vector<std::string> out;
  if (degenerate) out.emplace_back("lepskii_degenerate");
  return out;
}

LepskiiResult lepskii_choose(const OperatorLevels& ops, const Observation& obs,
                             const LepskiiConfig& cfg, const LevelSchedule& sched,
                             const std::optional<BalancingModel>& balancing) {
  cfg.validate();
  const std::vector<double> alphas = cfg.alpha_grid();
  const int m = static_cast<int>(alphas.size()) - 1;
  const double delta = cfg.delta_input;

  LepskiiResult result;
  result.m = m;
  result.kappa = std::sqrt(static_cast<double>(m));

  std::map<int, Observation> data_at_level;
  result.iterates.reserve(alphas.size());
  for (int j = 0; j <= m; ++j) {
    const double alpha = alphas[static_cast<std::size_t>(j)];
    const int n = level_of(alpha, delta, sched);
    if (n > obs.grid.n_cells() || !Grid(n).nests_into(obs.grid)) {
      throw std::invalid_argument("lepskii: observation level " + std::to_string(obs.grid.n_cells()) +
                                  " cannot be projected to level " + std::to_string(n));
    }
    auto it = data_at_level.find(n);
    if (it == data_at_level.end()) it = data_at_level.emplace(n, project(obs, n)).first;
    const auto op = ops.at(n);
    L2Vector x = regularize_normal_equations(*op, it->second.coeffs, alpha).x_alpha;
    const double psi = cfg.C_psi * std::sqrt(static_cast<double>(n) / (4.0 * alpha));
    result.candidates.push_back({alpha, n, x.norm(), psi});
    result.iterates.push_back(std::move(x));
  }

  auto band = [&](int k) { return 4.0 * result.kappa * delta * result.candidates[static_cast<std::size_t>(k)].psi; };
  auto passes = [&](int j, int& checked) {
    for (int k = 0; k < j; ++k) {
      ++checked;
      if (l2_distance(result.iterates[static_cast<std::size_t>(k)],
                      result.iterates[static_cast<std::size_t>(j)]) > band(k)) {
        return false;
      }
    }
    return true;
  };

  result.j_star = 0;
  for (int j = 1; j <= m; ++j) {
    if (!passes(j, result.accepted_pairs_checked)) break;
    result.j_star = j;
  }
  int scratch = 0;
  result.unrestricted_j_star = 0;
  for (int j = 1; j <= m; ++j) {
    if (passes(j, scratch)) result.unrestricted_j_star = j;
  }
  result.degenerate = result.j_star == 0;
  result.alpha_star = alphas[static_cast<std::size_t>(result.j_star)];
  result.x_star = result.iterates[static_cast<std::size_t>(result.j_star)];

  if (balancing) {
    auto phi_at = [&](int j) {
      return balancing->C1 * balancing->source(balancing->C2 * alphas[static_cast<std::size_t>(j)]);
    };
    if (!(delta * result.candidates[0].psi >= phi_at(0))) {
      throw std::invalid_argument("balancing model violates delta Psi(alpha_0) >= Phi(alpha_0)");
    }
    int j_check = 0;
    for (int j = 0; j <= m; ++j) {
      if (phi_at(j) <= delta * result.candidates[static_cast<std::size_t>(j)].psi) j_check = j;
    }
    result.balancing_j = j_check;
  }
  return result;
}

DataDrivenResult lepskii_with_estimate(const OperatorLevels& ops, const DataSource& raw_data,
                                       const NoiseEstimate& estimate,
                                       const LepskiiConfig& lepskii_template,
                                       const LevelSchedule& sched) {
  if (!(estimate.delta_hat > 0.0)) {
    throw NumericalError("estimated noise level is zero; the balancing principle needs delta_hat > 0");
  }
  LepskiiConfig cfg = lepskii_template;
  cfg.delta_input = estimate.delta_hat;
  const double alpha0 = estimate.delta_hat * estimate.delta_hat;
  const int finest = level_of(alpha0, estimate.delta_hat, sched);
  const std::optional<Observation> obs = raw_data(finest);
  if (!obs) throw NumericalError("data source cannot supply level " + std::to_string(finest));

  DataDrivenResult out;
  out.estimate = estimate;
  out.estimate_flagged = !estimate.converged;
  out.lepskii = lepskii_choose(ops, *obs, cfg, sched);
  out.x_final = out.lepskii.x_star;
  return out;
}

DataDrivenResult data_driven_choose(const OperatorLevels& ops, const DataSource& raw_data,
                                    const EstimatorConfig& est_cfg,
                                    const LepskiiConfig& lepskii_template,
                                    const LevelSchedule& sched) {
  const NoiseEstimate estimate = refine_delta_hat(raw_data, est_cfg, sched);
  return lepskii_with_estimate(ops, raw_data, estimate, lepskii_template, sched);
}

}  // namespace statreg
