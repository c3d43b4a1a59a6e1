#include "statreg/filters.hpp"

#include "statreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace statreg {

namespace {

void require_positive_alpha(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("regularization parameter must be positive");
}

}  // namespace

Filter::Filter(FilterKind kind, std::string name, Function f, double g0, double gs, double g)
    : kind_(kind), name_(std::move(name)), f_(std::move(f)), gamma0_(g0), gamma_star_(gs), gamma_(g) {}

Filter Filter::tikhonov() {
  return Filter(FilterKind::tikhonov, "tikhonov",
                [](double alpha, double theta) { return 1.0 / (alpha + theta); }, 1.0, 0.5, 1.0);
}

Filter Filter::spectral_cutoff() {
  return Filter(FilterKind::spectral_cutoff, "spectral_cutoff",
                [](double alpha, double theta) { return theta > alpha ? 1.0 / theta : 0.0; }, 1.0,
                1.0, 1.0);
}

Filter Filter::custom(std::string name, Function f, double gamma0, double gamma_star, double gamma) {
  if (!f) throw std::invalid_argument("custom filter needs a function");
  return Filter(FilterKind::custom, std::move(name), std::move(f), gamma0, gamma_star, gamma);
}

double Filter::value(double alpha, double theta) const {
  require_positive_alpha(alpha);
  return f_(alpha, theta);
}

double Filter::bias(double alpha, double theta) const { return 1.0 - theta * value(alpha, theta); }

double Filter::gain(double alpha, double s) const {
  require_positive_alpha(alpha);
  switch (kind_) {
    case FilterKind::tikhonov: return s / (alpha + s * s);
    case FilterKind::spectral_cutoff: return s * s > alpha ? 1.0 / s : 0.0;
    case FilterKind::custom: return s * f_(alpha, s * s);
  }
  return 0.0;
}

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::tikhonov: return "tikhonov";
    case FilterKind::spectral_cutoff: return "spectral_cutoff";
    case FilterKind::custom: return "custom";
  }
  return "unknown";
}

Filter parse_filter(const std::string& name) {
  if (name == "tikhonov") return Filter::tikhonov();
  if (name == "spectral_cutoff") return Filter::spectral_cutoff();
  throw ConfigError("unknown filter '" + name + "'");
}

double filter_value(const Filter& f, double alpha, double theta) { return f.value(alpha, theta); }
double bias_value(const Filter& f, double alpha, double theta) { return f.bias(alpha, theta); }

bool FilterReport::violates(const std::string& property) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const FilterViolation& v) { return v.property == property; });
}

FilterReport verify_filter_properties(const Filter& f, const DiscreteOperator& op,
                                      const std::vector<double>& alpha_grid) {
  if (alpha_grid.empty()) throw std::invalid_argument("alpha grid is empty");
  for (double a : alpha_grid) require_positive_alpha(a);

  std::vector<double> alphas = alpha_grid;
  std::sort(alphas.begin(), alphas.end(), std::greater<>());

  const Vector& s = op.singular_values();
  const int rank = op.rank();
  const double norm_sq = op.norm() * op.norm();
  constexpr double kRelTol = 1e-12;

  FilterReport report;
  auto fail = [&](const char* property, double alpha, double theta, double value, double bound) {
    report.violations.push_back({property, alpha, theta, value, bound});
  };

  for (int j = 0; j < rank; ++j) {
    const double theta = s[j] * s[j];
    double previous = std::abs(f.bias(alphas.front(), theta));
    const double first = previous;
    for (double alpha : alphas) {
      const double b = std::abs(f.bias(alpha, theta));
      ++report.checks;
      if (b > f.gamma0() * (1.0 + kRelTol)) fail("(2)", alpha, theta, b, f.gamma0());
      if (b > previous * (1.0 + kRelTol) + 1e-15) fail("(1)", alpha, theta, b, previous);
      previous = b;

      const double normalized = s[j] * std::abs(f.value(alpha, theta));
      const double bound = f.gamma_star() / std::sqrt(alpha);
      if (!(normalized < bound * (1.0 + kRelTol))) fail("(3)", alpha, theta, normalized, bound);
    }
    // Pointwise convergence: the bias must actually shrink along the grid. A finite grid
    // only resolves the limit for theta above its smallest alpha.
    if (theta > alphas.back() && !(previous == 0.0 || previous < first)) {
      fail("(1)", alphas.back(), theta, previous, first);
    }
  }

  // Dense scan for the stricter bound sup |F_alpha| <= gamma / alpha.
  constexpr int kScan = 10000;
  std::vector<double> thetas;
  thetas.reserve(kScan + static_cast<std::size_t>(rank));
  const double lo = std::log(norm_sq * 1e-16);
  const double hi = std::log(norm_sq);
  for (int i = 0; i < kScan; ++i) {
    thetas.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / (kScan - 1)));
  }
  for (int j = 0; j < rank; ++j) thetas.push_back(s[j] * s[j]);

  for (double alpha : alphas) {
    double sup = 0.0;
    double arg = 0.0;
    for (double theta : thetas) {
      const double v = std::abs(f.value(alpha, theta));
      if (v > sup) {
        sup = v;
        arg = theta;
      }
    }
    ++report.checks;
    const double bound = f.gamma() / alpha;
    if (sup > bound * (1.0 + kRelTol)) fail("stricter bound", alpha, arg, sup, bound);
  }
  return report;
}

RegularizedSolution regularize_svd(const Filter& f, const DiscreteOperator& op, const Vector& y,
                                   double alpha) {
  require_positive_alpha(alpha);
  const Vector& s = op.singular_values();
  std::vector<double> gains(static_cast<std::size_t>(op.rank()));
  for (int j = 0; j < op.rank(); ++j) gains[static_cast<std::size_t>(j)] = f.gain(alpha, s[j]);
  Vector x = spectral_series(op, y, gains);
  const double residual = (op.matrix() * x - y).norm();
  return {alpha, L2Vector(op.grid(), std::move(x)), residual, SolverRoute::svd_series};
}

RegularizedSolution regularize_normal_equations(const DiscreteOperator& op, const Vector& y,
                                                double alpha) {
  require_positive_alpha(alpha);
  if (y.size() != op.size()) throw std::invalid_argument("normal equations: dimension mismatch");
  Matrix system = op.gram();
  system.diagonal().array() += alpha;
  const Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Cholesky factorization of alpha I + B^T B failed");
  }
  Vector x = llt.solve(op.matrix().transpose() * y);
  const double residual = (op.matrix() * x - y).norm();
  return {alpha, L2Vector(op.grid(), std::move(x)), residual, SolverRoute::normal_equations};
}

std::vector<double> convergence_to_pseudoinverse(const Filter& f, const DiscreteOperator& op,
                                                 const Vector& y_in_range,
                                                 const std::vector<double>& alpha_seq) {
  const L2Vector reference = generalized_inverse_apply(op, L2Vector(op.grid(), y_in_range));
  std::vector<double> errors;
  errors.reserve(alpha_seq.size());
  for (double alpha : alpha_seq) {
    errors.push_back((regularize_svd(f, op, y_in_range, alpha).x_alpha.coeffs - reference.coeffs).norm());
  }
  return errors;
}

}  // namespace statreg
