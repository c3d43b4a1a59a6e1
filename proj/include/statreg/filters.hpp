#pragma once

#include "statreg/operator_model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace statreg {

enum class FilterKind { tikhonov, spectral_cutoff, custom };

/// Regularization filter F_alpha with bias b_alpha(theta) = 1 - theta F_alpha(theta)
/// and its declared constants:
///   gamma0     bound on |b_alpha|,
///   gamma_star bound on sqrt(alpha) * s |F_alpha(s^2)|,
///   gamma      bound on alpha * sup |F_alpha|.
class Filter {
 public:
  using Function = std::function<double(double alpha, double theta)>;

  static Filter tikhonov();
  static Filter spectral_cutoff();
  static Filter custom(std::string name, Function f, double gamma0, double gamma_star, double gamma);

  FilterKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double gamma0() const { return gamma0_; }
  double gamma_star() const { return gamma_star_; }
  double gamma() const { return gamma_; }

  double value(double alpha, double theta) const;
  double bias(double alpha, double theta) const;
  /// s * F_alpha(s^2), the coefficient of <y,u_j> v_j in R_alpha y.
  /// For spectral cut-off this is exactly 1/s on the kept range.
  double gain(double alpha, double s) const;

 private:
  Filter(FilterKind kind, std::string name, Function f, double g0, double gs, double g);

  FilterKind kind_;
  std::string name_;
  Function f_;
  double gamma0_;
  double gamma_star_;
  double gamma_;
};

std::string to_string(FilterKind kind);
Filter parse_filter(const std::string& name);

double filter_value(const Filter& f, double alpha, double theta);
double bias_value(const Filter& f, double alpha, double theta);

struct FilterViolation {
  std::string property;  ///< "(1)", "(2)", "(3)" or "stricter bound"
  double alpha = 0.0;
  double theta = 0.0;
  double value = 0.0;
  double bound = 0.0;
};

struct FilterReport {
  std::vector<FilterViolation> violations;
  int checks = 0;

  bool passed() const { return violations.empty(); }
  bool violates(const std::string& property) const;
};

/// Checks the filter laws over all s_j > 0 of `op` and all alpha in the grid:
///   (1) |b_alpha(s_j^2)| nonincreasing as alpha decreases and tending to 0,
///   (2) |b_alpha(s_j^2)| <= gamma0,
///   (3) s_j |F_alpha(s_j^2)| < gamma_star / sqrt(alpha),
///   stricter bound: sup_theta |F_alpha(theta)| <= gamma / alpha, with the sup
///   taken over 10^4 log-spaced points in (0, ||T||^2] plus every s_j^2.
FilterReport verify_filter_properties(const Filter& f, const DiscreteOperator& op,
                                      const std::vector<double>& alpha_grid);

enum class SolverRoute { svd_series, normal_equations };

struct RegularizedSolution {
  double alpha = 0.0;
  L2Vector x_alpha;
  double residual_norm = 0.0;  ///< ||T x_alpha - y||
  SolverRoute solver = SolverRoute::svd_series;
};

/// x_alpha = sum_{s_j > 0} F_alpha(s_j^2) s_j <y,u_j> v_j.
RegularizedSolution regularize_svd(const Filter& f, const DiscreteOperator& op, const Vector& y,
                                   double alpha);

/// Tikhonov via the SPD system (alpha I + B^T B) x = B^T y.
RegularizedSolution regularize_normal_equations(const DiscreteOperator& op, const Vector& y,
                                                double alpha);

/// ||x_{alpha_k} - T^+ y|| for each alpha in the sequence.
std::vector<double> convergence_to_pseudoinverse(const Filter& f, const DiscreteOperator& op,
                                                 const Vector& y_in_range,
                                                 const std::vector<double>& alpha_seq);

}  // namespace statreg
