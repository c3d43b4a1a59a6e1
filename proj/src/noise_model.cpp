#include "statreg/noise_model.hpp"

#include "statreg/errors.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace statreg {

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian_white: return "gaussian_white";
    case NoiseKind::dirac: return "dirac";
    case NoiseKind::scaled_rv: return "scaled_rv";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "gaussian_white") return NoiseKind::gaussian_white;
  if (name == "dirac") return NoiseKind::dirac;
  if (name == "scaled_rv") return NoiseKind::scaled_rv;
  throw ConfigError("unknown noise kind '" + name + "'");
}

namespace {

void require_unit_ball(const L2Vector& v, const char* what) {
  if (!(v.norm() <= 1.0 + 1e-12)) {
    throw std::invalid_argument(std::string(what) + " must have norm <= 1");
  }
}

}  // namespace

NoiseSpec NoiseSpec::white(std::uint64_t seed, std::uint64_t stream) {
  NoiseSpec spec;
  spec.kind = NoiseKind::gaussian_white;
  spec.seed = seed;
  spec.stream = stream;
  return spec;
}

NoiseSpec NoiseSpec::dirac(L2Vector xi) {
  require_unit_ball(xi, "dirac noise vector");
  NoiseSpec spec;
  spec.kind = NoiseKind::dirac;
  spec.fixed = std::move(xi);
  return spec;
}

NoiseSpec NoiseSpec::scaled_rv(L2Vector base, std::uint64_t seed, std::uint64_t stream) {
  require_unit_ball(base, "scaled_rv base vector");
  NoiseSpec spec;
  spec.kind = NoiseKind::scaled_rv;
  spec.seed = seed;
  spec.stream = stream;
  spec.fixed = std::move(base);
  return spec;
}

L2Vector random_unit_vector(const Grid& grid, std::uint64_t seed, std::uint64_t stream) {
  const CounterRng rng(seed, stream);
  Vector v(grid.n_cells());
  for (int j = 0; j < grid.n_cells(); ++j) v[j] = rng.normal(static_cast<std::uint64_t>(j));
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return L2Vector(grid, std::move(v));
}

Vector draw_noise(const NoiseSpec& spec, const Grid& grid) {
  switch (spec.kind) {
    case NoiseKind::gaussian_white: {
      const CounterRng rng(spec.seed, spec.stream);
      Vector out(grid.n_cells());
      for (int j = 0; j < grid.n_cells(); ++j) out[j] = rng.normal(static_cast<std::uint64_t>(j));
      return out;
    }
    case NoiseKind::dirac:
    case NoiseKind::scaled_rv: {
      if (!spec.fixed || !(spec.fixed->grid == grid)) {
        throw std::invalid_argument("noise vector is not defined on the requested grid");
      }
      if (spec.kind == NoiseKind::dirac) return spec.fixed->coeffs;
      // Stream-level sign: one draw of the two-point variable per replicate.
      const CounterRng rng(spec.seed, spec.stream);
      return rng.sign(0) * spec.fixed->coeffs;
    }
  }
  throw std::logic_error("unhandled noise kind");
}

Observation observe_data(const L2Vector& y_exact, double delta, const NoiseSpec& spec) {
  if (!(delta > 0.0)) throw std::invalid_argument("noise level delta must be positive");
  Observation obs{y_exact.grid, y_exact, delta, Vector(), spec, spec.seed};
  obs.coeffs = y_exact.coeffs + delta * draw_noise(spec, y_exact.grid);
  return obs;
}

Observation observe(const DiscreteOperator& op, const L2Vector& x_true, double delta,
                    const NoiseSpec& spec) {
  return observe_data(apply(op, x_true), delta, spec);
}

Vector pointwise_values(const Observation& obs) {
  return std::sqrt(static_cast<double>(obs.grid.n_cells())) * obs.coeffs;
}

Observation scaled(const Observation& obs, double c) {
  Observation out = obs;
  out.coeffs *= c;
  out.y_exact.coeffs *= c;
  return out;
}

void write_observation_csv(const Observation& obs, std::ostream& out) {
  out << std::setprecision(17);
  out << "# delta=" << obs.delta << '\n';
  out << "# seed=" << obs.seed_used << '\n';
  out << "# stream=" << obs.noise.stream << '\n';
  out << "# noise=" << to_string(obs.noise.kind) << '\n';
  out << "j,t_j,y_exact_j,coeff_j\n";
  for (int j = 1; j <= obs.grid.n_cells(); ++j) {
    out << j << ',' << obs.grid.node(j) << ',' << obs.y_exact.coeffs[j - 1] << ','
        << obs.coeffs[j - 1] << '\n';
  }
}

}  // namespace statreg
