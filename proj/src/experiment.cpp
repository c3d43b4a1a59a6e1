#include "statreg/experiment.hpp"

#include "statreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace statreg {

namespace {

constexpr int kSourceTerms = 32;
constexpr double kPi = std::numbers::pi;

double omega(int k) { return (k - 0.5) * kPi; }

bool is_power_of_two(long long n) { return n >= 1 && (n & (n - 1)) == 0; }

Kernel kernel_by_name(const std::string& name) {
  if (name == "one") return [](double, double) { return 1.0; };
  if (name == "min") return [](double t, double u) { return std::min(t, u); };
  if (name == "exp") return [](double t, double u) { return std::exp(t - u); };
  throw ConfigError("unknown kernel '" + name + "'");
}

KernelSupport parse_support(const std::string& name) {
  if (name == "volterra") return KernelSupport::volterra;
  if (name == "fredholm") return KernelSupport::fredholm;
  throw ConfigError("unknown kernel support '" + name + "'");
}

L2Vector cell_increments(const Grid& grid, const std::function<double(double)>& primitive) {
  const int n = grid.n_cells();
  const double scale = std::sqrt(static_cast<double>(n));
  Vector c(n);
  double left = primitive(0.0);
  for (int j = 1; j <= n; ++j) {
    const double right = primitive(grid.node(j));
    c[j - 1] = scale * (right - left);
    left = right;
  }
  return L2Vector(grid, std::move(c));
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

double rms(const std::vector<double>& errors) {
  double sum = 0.0;
  for (double e : errors) sum += e * e;
  return std::sqrt(sum / static_cast<double>(errors.size()));
}

LepskiiConfig lepskii_config(const Problem& problem, double delta) {
  LepskiiConfig lc;
  lc.q = problem.config().lepskii_q;
  lc.C_psi = problem.config().lepskii_C_psi;
  lc.norm_T_sq = problem.norm_T_sq();
  lc.delta_input = delta;
  return lc;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::oracle: return "oracle";
    case Method::discrepancy: return "discrepancy";
    case Method::lepskii_known_delta: return "lepskii_known_delta";
    case Method::lepskii_estimated_delta: return "lepskii_estimated_delta";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "oracle") return Method::oracle;
  if (name == "discrepancy") return Method::discrepancy;
  if (name == "lepskii_known_delta") return Method::lepskii_known_delta;
  if (name == "lepskii_estimated_delta") return Method::lepskii_estimated_delta;
  throw ConfigError("unknown method '" + name + "'");
}

// ---------------------------------------------------------------------------

TestSignal TestSignal::parse(const std::string& name) {
  TestSignal s;
  s.name_ = name;
  if (name == "smooth") {
    s.shape_ = Shape::smooth;
  } else if (name == "rough") {
    s.shape_ = Shape::rough;
  } else if (name == "source_half" || name == "source_one") {
    s.shape_ = Shape::source;
    const double nu = name == "source_half" ? 0.5 : 1.0;
    double norm_sq = 0.0;
    for (int k = 1; k <= kSourceTerms; ++k) norm_sq += 1.0 / (static_cast<double>(k) * k);
    const double c0 = 1.0 / std::sqrt(norm_sq);
    for (int k = 1; k <= kSourceTerms; ++k) {
      s.spectral_coeffs_.push_back(c0 / k * std::pow(omega(k), -2.0 * nu));
    }
  } else {
    throw ConfigError("unknown test signal '" + name + "'");
  }
  return s;
}

double TestSignal::norm_sq() const {
  switch (shape_) {
    case Shape::smooth: return 0.5;
    case Shape::rough: return 0.5;
    case Shape::source: {
      double sum = 0.0;
      for (double a : spectral_coeffs_) sum += a * a;
      return sum;
    }
  }
  return 0.0;
}

double TestSignal::first_primitive(double t) const {
  switch (shape_) {
    case Shape::smooth: return (1.0 - std::cos(kPi * t)) / kPi;
    case Shape::rough: return std::min(t, 0.5);
    case Shape::source: {
      double sum = 0.0;
      for (int k = 1; k <= kSourceTerms; ++k) {
        const double w = omega(k);
        sum += spectral_coeffs_[k - 1] * std::numbers::sqrt2 * std::sin(w * t) / w;
      }
      return sum;
    }
  }
  return 0.0;
}

double TestSignal::second_primitive(double t) const {
  switch (shape_) {
    case Shape::smooth: return t / kPi - std::sin(kPi * t) / (kPi * kPi);
    case Shape::rough: return t < 0.5 ? 0.5 * t * t : 0.125 + 0.5 * (t - 0.5);
    case Shape::source: {
      double sum = 0.0;
      for (int k = 1; k <= kSourceTerms; ++k) {
        const double w = omega(k);
        sum += spectral_coeffs_[k - 1] * std::numbers::sqrt2 * (1.0 - std::cos(w * t)) / (w * w);
      }
      return sum;
    }
  }
  return 0.0;
}

L2Vector TestSignal::coefficients(const Grid& grid) const {
  return cell_increments(grid, [this](double t) { return first_primitive(t); });
}

L2Vector TestSignal::integrated_coefficients(const Grid& grid) const {
  return cell_increments(grid, [this](double t) { return second_primitive(t); });
}

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_flat(const FlatConfig& flat) {
  static const std::vector<std::string> known = {
      "operator.kind",      "operator.kernel",        "operator.support",
      "operator.holder_s",  "operator.reference_n",   "signal.kind",
      "experiment.deltas",  "experiment.replicates",  "experiment.seed",
      "experiment.method",  "noise.kind",             "noise.dirac_norm",
      "noise.kind_per_delta",
      "regularization.filter", "schedule.r",          "schedule.eta",
      "schedule.c1",        "schedule.c2",            "schedule.n_max",
      "estimator.tau",      "estimator.K",            "estimator.p",
      "estimator.eps",      "estimator.m_window",     "estimator.n_init",
      "estimator.max_iterations", "lepskii.q",        "lepskii.C_psi",
      "discrepancy.tau_dp", "simulate.n",             "simulate.delta",
      "output.path"};
  const auto unknown = flat.unknown_keys(known);
  if (!unknown.empty()) throw ConfigError("unknown config key '" + unknown.front() + "'");

  ExperimentConfig c;
  c.op.kind = flat.get_string("operator.kind", c.op.kind);
  c.op.kernel = flat.get_string("operator.kernel", c.op.kernel);
  c.op.support = parse_support(flat.get_string("operator.support", "volterra"));
  c.op.holder_s = flat.get_double("operator.holder_s", c.op.holder_s);
  c.op.reference_n = static_cast<int>(flat.get_int("operator.reference_n", c.op.reference_n));
  c.signal = flat.get_string("signal.kind", c.signal);
  c.deltas = flat.get_doubles("experiment.deltas", c.deltas);
  c.replicates = static_cast<int>(flat.get_int("experiment.replicates", c.replicates));
  const long long seed = flat.get_int("experiment.seed", static_cast<long long>(c.seed));
  if (seed < 0) throw ConfigError("experiment.seed must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.method = parse_method(flat.get_string("experiment.method", to_string(c.method)));
  c.noise = parse_noise_kind(flat.get_string("noise.kind", to_string(c.noise)));
  if (flat.has("noise.kind_per_delta")) {
    std::istringstream list(flat.get_string("noise.kind_per_delta", ""));
    std::string item;
    while (std::getline(list, item, ',')) {
      const auto first = item.find_first_not_of(" \t");
      const auto last = item.find_last_not_of(" \t");
      if (first == std::string::npos) throw ConfigError("noise.kind_per_delta has an empty entry");
      c.noise_per_delta.push_back(parse_noise_kind(item.substr(first, last - first + 1)));
    }
  }
  c.dirac_norm = flat.get_double("noise.dirac_norm", c.dirac_norm);
  c.filter = flat.get_string("regularization.filter", c.filter);

  // The schedule defaults follow the asserted Hoelder exponent unless overridden.
  try {
    c.schedule = LevelSchedule::for_holder(c.op.holder_s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("operator.holder_s: ") + e.what());
  }
  c.schedule.r = flat.get_double("schedule.r", c.schedule.r);
  c.schedule.eta = flat.get_double("schedule.eta", c.schedule.eta);
  c.schedule.c1 = flat.get_double("schedule.c1", c.schedule.c1);
  c.schedule.c2 = flat.get_double("schedule.c2", c.schedule.c2);
  c.schedule.n_max = static_cast<int>(flat.get_int("schedule.n_max", c.schedule.n_max));

  c.estimator.tau = flat.get_double("estimator.tau", c.estimator.tau);
  c.estimator.K = flat.get_double("estimator.K", c.estimator.K);
  c.estimator.p = flat.get_double("estimator.p", c.estimator.p);
  c.estimator.eps = flat.get_double("estimator.eps", c.estimator.eps);
  c.estimator.m_window = static_cast<int>(flat.get_int("estimator.m_window", c.estimator.m_window));
  c.estimator.n_init = static_cast<int>(flat.get_int("estimator.n_init", c.estimator.n_init));
  c.estimator.max_iterations =
      static_cast<int>(flat.get_int("estimator.max_iterations", c.estimator.max_iterations));

  c.lepskii_q = flat.get_double("lepskii.q", c.lepskii_q);
  c.lepskii_C_psi = flat.get_double("lepskii.C_psi", c.lepskii_C_psi);
  c.tau_dp = flat.get_double("discrepancy.tau_dp", c.tau_dp);
  c.simulate_n = static_cast<int>(flat.get_int("simulate.n", c.simulate_n));
  c.simulate_delta = flat.get_double("simulate.delta", c.simulate_delta);
  c.output = flat.get_string("output.path", c.output);
  c.validate();
  return c;
}

NoiseKind ExperimentConfig::noise_at(std::size_t delta_index) const {
  return noise_per_delta.empty() ? noise : noise_per_delta.at(delta_index);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  return from_flat(FlatConfig::load(path));
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (op.kind != "integration" && op.kind != "kernel") fail("operator.kind must be integration or kernel");
  if (op.kind == "kernel") {
    kernel_by_name(op.kernel);
    if (!is_power_of_two(op.reference_n)) fail("operator.reference_n must be a power of two");
    if (schedule.n_max > op.reference_n) fail("schedule.n_max must not exceed operator.reference_n");
  }
  if (!(op.holder_s > 0.5 && op.holder_s <= 1.0)) fail("operator.holder_s must lie in (1/2, 1]");
  TestSignal::parse(signal);
  parse_filter(filter);
  if (deltas.empty()) fail("experiment.deltas must not be empty");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) fail("experiment.deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) fail("experiment.deltas must be strictly decreasing");
  }
  if (replicates < 1) fail("experiment.replicates must be at least 1");
  if (!noise_per_delta.empty() && noise_per_delta.size() != deltas.size()) {
    fail("noise.kind_per_delta must list one kind per delta");
  }
  if (!(dirac_norm >= 0.0 && dirac_norm <= 1.0)) fail("noise.dirac_norm must lie in [0, 1]");
  if (!is_power_of_two(schedule.n_max)) fail("schedule.n_max must be a power of two");
  try {
    schedule.validate();
    estimator.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (!(lepskii_q > 1.0)) fail("lepskii.q must exceed 1");
  if (!(lepskii_C_psi > 0.0)) fail("lepskii.C_psi must be positive");
  if (!(tau_dp > 1.0)) fail("discrepancy.tau_dp must exceed 1");
  if (simulate_n < 1 || simulate_n > schedule.n_max) fail("simulate.n must lie in [1, schedule.n_max]");
  if (!(simulate_delta > 0.0)) fail("simulate.delta must be positive");
}

// ---------------------------------------------------------------------------

Problem::Problem(const ExperimentConfig& cfg) : cfg_(cfg), signal_(TestSignal::parse(cfg.signal)) {
  cfg_.validate();
  if (cfg_.op.kind == "integration") {
    levels_ = std::make_unique<OperatorLevels>(
        [](const Grid& g) { return build_integration_operator(g); });
    data_level_ = cfg_.schedule.n_max;
    fine_data_ = signal_.integrated_coefficients(Grid(data_level_));
  } else {
    const Kernel kernel = kernel_by_name(cfg_.op.kernel);
    const double s = cfg_.op.holder_s;
    const KernelSupport support = cfg_.op.support;
    levels_ = std::make_unique<OperatorLevels>([kernel, s, support](const Grid& g) {
      return build_holder_kernel_operator(g, kernel, s, support);
    });
    data_level_ = cfg_.op.reference_n;
    const Grid ref(data_level_);
    const Matrix k = galerkin_matrix(ref, kernel, support);
    fine_data_ = L2Vector(ref, k * signal_.coefficients(ref).coeffs);
  }
  const double norm = levels_->at(std::min(256, data_level_))->norm();
  norm_T_sq_ = norm * norm;
}

double Problem::x_norm() const { return std::sqrt(signal_.norm_sq()); }

L2Vector Problem::exact_data(int n) const { return project(fine_data_, n); }

L2Vector Problem::x_coefficients(int n) const { return signal_.coefficients(Grid(n)); }

double Problem::error(const L2Vector& x_h) const {
  const L2Vector qx = x_coefficients(x_h.grid.n_cells());
  const double outside = std::max(0.0, signal_.norm_sq() - qx.norm_sq());
  return std::sqrt(outside + (qx.coeffs - x_h.coeffs).squaredNorm());
}

Realization Problem::realize(double delta, std::uint64_t stream) const {
  return realize(delta, cfg_.noise, stream);
}

Realization Problem::realize(double delta, NoiseKind kind, std::uint64_t stream) const {
  return Realization(this, delta, kind, cfg_.seed, stream);
}

Realization::Realization(const Problem* problem, double delta, NoiseKind kind, std::uint64_t seed,
                         std::uint64_t stream)
    : problem_(problem), delta_(delta), kind_(kind), seed_(seed), stream_(stream) {
  if (!(delta > 0.0)) throw std::invalid_argument("realization needs delta > 0");
  if (kind_ == NoiseKind::gaussian_white) {
    fine_noise_ = draw_noise(NoiseSpec::white(seed, stream), Grid(problem->data_level_));
  }
}

std::optional<Observation> Realization::at(int n) const {
  const int level = dyadic_level(n);
  if (level > problem_->data_level_) return std::nullopt;
  const Grid grid(level);
  const ExperimentConfig& cfg = problem_->cfg_;

  NoiseSpec spec;
  switch (kind_) {
    case NoiseKind::gaussian_white:
      spec = NoiseSpec::white(seed_, stream_);
      break;
    case NoiseKind::dirac: {
      L2Vector xi = random_unit_vector(grid, seed_, stream_);
      xi.coeffs *= cfg.dirac_norm;
      spec = NoiseSpec::dirac(std::move(xi));
      break;
    }
    case NoiseKind::scaled_rv:
      spec = NoiseSpec::scaled_rv(random_unit_vector(grid, seed_, combine_stream(stream_, 1)),
                                  seed_, stream_);
      break;
  }
  if (kind_ != NoiseKind::gaussian_white) {
    return observe_data(problem_->exact_data(level), delta_, spec);
  }
  const L2Vector xi = project(L2Vector(Grid(problem_->data_level_), fine_noise_), level);
  Observation obs{grid, problem_->exact_data(level), delta_, Vector(), spec, seed_};
  obs.coeffs = obs.y_exact.coeffs + delta_ * xi.coeffs;
  return obs;
}

DataSource Realization::source() const {
  return [this](int n) { return at(n); };
}

std::uint64_t replicate_stream(std::size_t delta_index, int replicate) {
  return combine_stream(static_cast<std::uint64_t>(delta_index), static_cast<std::uint64_t>(replicate));
}

// ---------------------------------------------------------------------------

MethodOutcome run_method(const Problem& problem, const Realization& data, Method method) {
  const ExperimentConfig& cfg = problem.config();
  const double delta = data.delta();
  MethodOutcome out;
  const auto error_of = [&](const L2Vector& x) { return problem.error(x); };

  if (method == Method::lepskii_estimated_delta) {
    LepskiiConfig tmpl = lepskii_config(problem, delta);
    const DataDrivenResult r =
        data_driven_choose(problem.levels(), data.source(), cfg.estimator, tmpl, cfg.schedule);
    out.x = r.x_final;
    out.alpha = r.lepskii.alpha_star;
    out.delta_hat = r.estimate.delta_hat;
    out.flagged = r.estimate_flagged || r.lepskii.degenerate;
    out.j_star = r.lepskii.j_star;
    out.m = r.lepskii.m;
    out.error = error_of(out.x);
    return out;
  }

  const LepskiiConfig lc = lepskii_config(problem, delta);
  const int n = level_of(delta * delta, delta, cfg.schedule);
  const std::optional<Observation> obs = data.at(n);
  if (!obs) throw NumericalError("level " + std::to_string(n) + " exceeds the data grid");
  out.delta_hat = delta;
  out.m = lc.m();

  switch (method) {
    case Method::lepskii_known_delta: {
      const LepskiiResult r = lepskii_choose(problem.levels(), *obs, lc, cfg.schedule);
      out.x = r.x_star;
      out.alpha = r.alpha_star;
      out.flagged = r.degenerate;
      out.j_star = r.j_star;
      break;
    }
    case Method::oracle: {
      const auto op = problem.levels().at(obs->grid.n_cells());
      const Filter filter = parse_filter(cfg.filter);
      const OracleChoice r = oracle_choice(*op, error_of, *obs, filter, lc.alpha_grid());
      out.x = regularize_svd(filter, *op, obs->coeffs, r.alpha).x_alpha;
      out.alpha = r.alpha;
      break;
    }
    case Method::discrepancy: {
      const auto op = problem.levels().at(obs->grid.n_cells());
      const Filter filter = parse_filter(cfg.filter);
      const DiscrepancyChoice r = discrepancy_principle(*op, *obs, filter, cfg.tau_dp, lc.alpha_grid());
      out.x = regularize_svd(filter, *op, obs->coeffs, r.alpha).x_alpha;
      out.alpha = r.alpha;
      out.flagged = !r.satisfied;
      break;
    }
    case Method::lepskii_estimated_delta:
      break;
  }
  out.error = error_of(out.x);
  return out;
}

namespace {

template <class Fn>
void for_each_replicate(int replicates, Fn&& fn) {
#if defined(STATREG_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
  for (int r = 0; r < replicates; ++r) fn(r);
}

// Collects per-replicate results by index so that the reduction below is independent of
// the order in which workers finish.
template <class T, class Fn>
std::vector<T> collect(int replicates, Fn&& fn) {
  std::vector<std::optional<T>> slots(static_cast<std::size_t>(replicates));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(replicates));
  for_each_replicate(replicates, [&](int r) {
    try {
      slots[static_cast<std::size_t>(r)] = fn(r);
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

MseRow summarize(const Problem& problem, double delta, Method method,
                 const std::vector<MethodOutcome>& outcomes) {
  MseRow row;
  row.delta = delta;
  row.method = method;
  row.rep_count = static_cast<int>(outcomes.size());

  int finest = 1;
  double alpha_sum = 0.0;
  for (const auto& o : outcomes) {
    row.errors.push_back(o.error);
    finest = std::max(finest, o.x.grid.n_cells());
    alpha_sum += o.alpha;
    if (o.flagged) ++row.flagged;
  }
  row.mean_alpha = alpha_sum / row.rep_count;
  row.mc_mse = rms(row.errors);

  const Grid common(finest);
  Vector mean = Vector::Zero(finest);
  for (const auto& o : outcomes) mean += prolongate(o.x, common).coeffs;
  mean /= static_cast<double>(row.rep_count);
  const L2Vector mean_x(common, mean);
  const double bias = problem.error(mean_x);
  row.mc_bias_sq = bias * bias;
  double var = 0.0;
  for (const auto& o : outcomes) var += (prolongate(o.x, common).coeffs - mean).squaredNorm();
  row.mc_variance = var / row.rep_count;

  const double xn = problem.x_norm();
  for (double f : {0.5, 0.2, 0.1, 0.05}) {
    const double eps = f * xn;
    const auto above = std::count_if(row.errors.begin(), row.errors.end(),
                                     [eps](double e) { return e > eps; });
    row.eps_grid.push_back(eps);
    row.exceed_rate.push_back(static_cast<double>(above) / row.rep_count);
  }
  return row;
}

}  // namespace

std::vector<MseRow> run_mse_study(const ExperimentConfig& cfg) {
  const Problem problem(cfg);
  std::vector<MseRow> rows;
  for (std::size_t k = 0; k < cfg.deltas.size(); ++k) {
    const double delta = cfg.deltas[k];
    const auto outcomes = collect<MethodOutcome>(cfg.replicates, [&](int r) {
      const Realization data = problem.realize(delta, cfg.noise_at(k), replicate_stream(k, r));
      return run_method(problem, data, cfg.method);
    });
    rows.push_back(summarize(problem, delta, cfg.method, outcomes));
  }
  return rows;
}

void write_mse_csv(const std::vector<MseRow>& rows, std::ostream& out) {
  out << std::setprecision(17);
  out << "delta,method,mc_mse,mc_bias_sq,mc_variance,rep_count,mean_alpha,flagged";
  if (!rows.empty()) {
    for (std::size_t i = 0; i < rows.front().eps_grid.size(); ++i) out << ",exceed_rate_" << i;
  }
  out << '\n';
  for (const auto& row : rows) {
    out << row.delta << ',' << to_string(row.method) << ',' << row.mc_mse << ',' << row.mc_bias_sq
        << ',' << row.mc_variance << ',' << row.rep_count << ',' << row.mean_alpha << ','
        << row.flagged;
    for (double rate : row.exceed_rate) out << ',' << rate;
    out << '\n';
  }
}

std::vector<VetoRow> run_veto_study(const ExperimentConfig& cfg) {
  if (cfg.method != Method::lepskii_estimated_delta) {
    throw ConfigError("the veto study needs experiment.method = lepskii_estimated_delta");
  }
  const Problem problem(cfg);
  struct Triple {
    MethodOutcome oracle, known, estimated;
  };
  std::vector<VetoRow> rows;
  for (std::size_t k = 0; k < cfg.deltas.size(); ++k) {
    const double delta = cfg.deltas[k];
    const auto triples = collect<Triple>(cfg.replicates, [&](int r) {
      const Realization data = problem.realize(delta, cfg.noise_at(k), replicate_stream(k, r));
      return Triple{run_method(problem, data, Method::oracle),
                    run_method(problem, data, Method::lepskii_known_delta),
                    run_method(problem, data, Method::lepskii_estimated_delta)};
    });

    VetoRow row;
    row.delta = delta;
    row.rep_count = cfg.replicates;
    std::vector<double> e_oracle, e_known, e_est;
    int hits = 0;
    int nonconverged = 0;
    double dh_sum = 0.0;
    const double upper = cfg.estimator.K * cfg.estimator.tau * delta;
    for (const auto& t : triples) {
      e_oracle.push_back(t.oracle.error);
      e_known.push_back(t.known.error);
      e_est.push_back(t.estimated.error);
      if (t.estimated.delta_hat >= delta && t.estimated.delta_hat <= upper) ++hits;
      dh_sum += t.estimated.delta_hat;
      if (t.known.j_star == 0) ++row.degenerate_known;
      if (t.estimated.j_star == 0) ++row.degenerate_estimated;
      row.m = t.known.m;
    }
    // Non-convergence of the estimator is reported separately from degeneracy.
    for (const auto& t : triples) {
      if (t.estimated.flagged && t.estimated.j_star != 0) ++nonconverged;
    }
    row.mse_oracle = rms(e_oracle);
    row.mse_known = rms(e_known);
    row.mse_estimated = rms(e_est);
    row.ratio = row.mse_known > 0.0 ? row.mse_estimated / row.mse_known : 0.0;
    row.hit_rate = static_cast<double>(hits) / cfg.replicates;
    row.mean_delta_hat = dh_sum / cfg.replicates;
    row.nonconverged_rate = static_cast<double>(nonconverged) / cfg.replicates;
    rows.push_back(row);
  }
  return rows;
}

void write_veto_csv(const std::vector<VetoRow>& rows, std::ostream& out) {
  out << std::setprecision(17);
  out << "delta,m,mse_oracle,mse_known_delta,mse_estimated_delta,ratio,hit_rate,mean_delta_hat,"
         "nonconverged_rate,degenerate_known,degenerate_estimated,rep_count\n";
  for (const auto& r : rows) {
    out << r.delta << ',' << r.m << ',' << r.mse_oracle << ',' << r.mse_known << ','
        << r.mse_estimated << ',' << r.ratio << ',' << r.hit_rate << ',' << r.mean_delta_hat << ','
        << r.nonconverged_rate << ',' << r.degenerate_known << ',' << r.degenerate_estimated << ','
        << r.rep_count << '\n';
  }
}

// ---------------------------------------------------------------------------

BiasVarianceReport run_bias_variance_check(const DiscreteOperator& op, const L2Vector& x_true,
                                           const Filter& filter, double alpha, double delta,
                                           int replicates, std::uint64_t seed) {
  if (replicates < 1) throw std::invalid_argument("bias-variance check needs replicates >= 1");
  if (!(delta >= 0.0)) throw std::invalid_argument("bias-variance check needs delta >= 0");
  if (!(x_true.grid == op.grid())) throw std::invalid_argument("bias-variance check: grid mismatch");

  const Vector y = apply(op, x_true).coeffs;
  const Vector bias_vec = x_true.coeffs - regularize_svd(filter, op, y, alpha).x_alpha.coeffs;

  BiasVarianceReport rep;
  rep.replicates = replicates;
  rep.bias_sq = bias_vec.squaredNorm();
  rep.variance_bound = filter.gamma() * filter.gamma() / (alpha * alpha) * op.hs_norm() * op.hs_norm();

  struct Sample {
    double err_sq, v;
  };
  const auto samples = collect<Sample>(replicates, [&](int r) {
    const Vector xi = draw_noise(NoiseSpec::white(seed, static_cast<std::uint64_t>(r)), op.grid());
    const Vector r_xi = regularize_svd(filter, op, xi, alpha).x_alpha.coeffs;
    return Sample{(bias_vec - delta * r_xi).squaredNorm(), r_xi.squaredNorm()};
  });

  std::vector<double> err_sq, v, d;
  for (const auto& s : samples) {
    err_sq.push_back(s.err_sq);
    v.push_back(s.v);
    d.push_back(s.err_sq - rep.bias_sq - delta * delta * s.v);
  }
  rep.mse_sq = moments(err_sq).mean;
  rep.v_hat = moments(v).mean;
  const Moments md = moments(d);
  rep.discrepancy = md.mean;
  rep.standard_error = md.sd / std::sqrt(static_cast<double>(replicates));
  return rep;
}

}  // namespace statreg
