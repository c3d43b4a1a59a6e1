#pragma once

#include "statreg/counter_rng.hpp"
#include "statreg/grid.hpp"
#include "statreg/operator_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace statreg {

enum class NoiseKind { gaussian_white, dirac, scaled_rv };

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& name);

/// Normalized noise Xi; the observation adds delta * Xi.
///  - gaussian_white: coordinates iid N(0,1), ||Cov|| = 1.
///  - dirac: a fixed vector xi with ||xi|| <= 1.
///  - scaled_rv: +/- base with a fair random sign, ||base|| <= 1, so E||Xi||^2 <= 1.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::gaussian_white;
  std::uint64_t seed = 0;
  /// Replicate index; selects an independent stream of the counter generator.
  std::uint64_t stream = 0;
  /// xi for dirac, base vector for scaled_rv.
  std::optional<L2Vector> fixed;

  static NoiseSpec white(std::uint64_t seed, std::uint64_t stream = 0);
  static NoiseSpec dirac(L2Vector xi);
  static NoiseSpec scaled_rv(L2Vector base, std::uint64_t seed, std::uint64_t stream = 0);
};

/// Realized Y_{delta,j} = <y, w_j> + delta * xi_j on the grid of the operator.
struct Observation {
  Grid grid;
  L2Vector y_exact;
  double delta = 0.0;
  Vector coeffs;
  NoiseSpec noise;
  std::uint64_t seed_used = 0;
};

/// Unit-norm vector in a seeded random direction (building block for dirac noise).
L2Vector random_unit_vector(const Grid& grid, std::uint64_t seed, std::uint64_t stream);

/// Noise coordinates for `grid`; deterministic in (spec, n).
Vector draw_noise(const NoiseSpec& spec, const Grid& grid);

/// Observation of y = T x_true with noise level delta.
Observation observe(const DiscreteOperator& op, const L2Vector& x_true, double delta,
                    const NoiseSpec& spec);

/// Observation of a given exact data vector.
Observation observe_data(const L2Vector& y_exact, double delta, const NoiseSpec& spec);

/// Cell heights of QY_delta: sqrt(n) * coeffs.
Vector pointwise_values(const Observation& obs);

/// Same observation with every coefficient multiplied by c.
Observation scaled(const Observation& obs, double c);

/// CSV with commented header lines (delta, seed, noise kind), then columns j,t_j,y_exact,coeff.
void write_observation_csv(const Observation& obs, std::ostream& out);

}  // namespace statreg
