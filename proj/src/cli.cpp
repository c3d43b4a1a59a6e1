#include "statreg/cli.hpp"

#include "statreg/errors.hpp"
#include "statreg/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace statreg {

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<long long> seed;
  std::string out_path;
  std::string method;
};

ExperimentConfig resolve(const CommonOptions& opts) {
  FlatConfig flat;
  if (!opts.config_path.empty()) flat = FlatConfig::load(opts.config_path);
  if (opts.seed) flat.set("experiment.seed", std::to_string(*opts.seed));
  if (!opts.method.empty()) flat.set("experiment.method", opts.method);
  return ExperimentConfig::from_flat(flat);
}

// Writes to --out, else output.path, else stdout.
void emit(const std::string& text, const CommonOptions& opts, const ExperimentConfig& cfg) {
  const std::string path = !opts.out_path.empty() ? opts.out_path : cfg.output;
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  out << text;
}

std::string cmd_simulate(const ExperimentConfig& cfg) {
  const Problem problem(cfg);
  const Realization data = problem.realize(cfg.simulate_delta, 0);
  const std::optional<Observation> obs = data.at(cfg.simulate_n);
  if (!obs) throw ConfigError("simulate.n exceeds the data grid");
  std::ostringstream out;
  write_observation_csv(*obs, out);
  return out.str();
}

std::string cmd_estimate(const ExperimentConfig& cfg) {
  const Problem problem(cfg);
  const double delta = cfg.deltas.front();
  const Realization data = problem.realize(delta, cfg.noise_at(0), replicate_stream(0, 0));
  const NoiseEstimate est = refine_delta_hat(data.source(), cfg.estimator, cfg.schedule);
  std::ostringstream out;
  out << std::setprecision(17);
  out << "delta,delta_tilde_sq,delta_hat,n_used,tau,iterations,converged\n";
  out << delta << ',' << est.delta_tilde_sq << ',' << est.delta_hat << ',' << est.n_used << ','
      << est.tau << ',' << est.iterations << ',' << (est.converged ? 1 : 0) << '\n';
  return out.str();
}

std::string cmd_choose(const ExperimentConfig& cfg) {
  const Problem problem(cfg);
  std::ostringstream out;
  out << std::setprecision(17);
  out << "delta,method,delta_hat,j_star,alpha_star,error,flags\n";
  for (std::size_t k = 0; k < cfg.deltas.size(); ++k) {
    const Realization data = problem.realize(cfg.deltas[k], cfg.noise_at(k), replicate_stream(k, 0));
    const MethodOutcome o = run_method(problem, data, cfg.method);
    out << cfg.deltas[k] << ',' << to_string(cfg.method) << ',' << o.delta_hat << ',' << o.j_star
        << ',' << o.alpha << ',' << o.error << ',' << (o.flagged ? "flagged" : "") << '\n';
  }
  return out.str();
}

std::string cmd_converge(const ExperimentConfig& cfg, const std::string& study) {
  std::ostringstream out;
  const bool veto = study == "veto" || (study == "auto" && cfg.method == Method::lepskii_estimated_delta);
  if (veto) {
    write_veto_csv(run_veto_study(cfg), out);
  } else {
    write_mse_csv(run_mse_study(cfg), out);
  }
  return out.str();
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Statistical regularization of linear inverse problems"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string study = "auto";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "flat key = value configuration file");
    sub->add_option("--seed", opts.seed, "overrides experiment.seed");
    sub->add_option("--out", opts.out_path, "output file (default: output.path or stdout)");
    sub->add_option("--method", opts.method,
                    "oracle | discrepancy | lepskii_known_delta | lepskii_estimated_delta");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "emit one observation as CSV");
  CLI::App* estimate = app.add_subcommand("estimate-noise", "run the noise-level estimator");
  CLI::App* choose = app.add_subcommand("choose", "run one parameter-choice method");
  CLI::App* converge = app.add_subcommand("converge", "Monte Carlo convergence study");
  for (CLI::App* sub : {simulate, estimate, choose, converge}) add_common(sub);
  converge->add_option("--study", study, "mse | veto | auto")
      ->check(CLI::IsMember({"mse", "veto", "auto"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const ExperimentConfig cfg = resolve(opts);
    std::string text;
    if (*simulate) text = cmd_simulate(cfg);
    if (*estimate) text = cmd_estimate(cfg);
    if (*choose) text = cmd_choose(cfg);
    if (*converge) text = cmd_converge(cfg, study);
    emit(text, opts, cfg);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace statreg
