#pragma once

#include "statreg/grid.hpp"
#include "statreg/noise_model.hpp"

namespace statreg {

/// Coupled discretization level n(alpha, delta) = max(ceil(c1 alpha^{-1/(2r)}), ceil(c2 delta^{-eta})),
/// capped at n_max. Setting c2 = 0 recovers the alpha-only rule n(alpha) ~ alpha^{-1/(2r)}.
struct LevelSchedule {
  double r = 1.0;
  double eta = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  int n_max = 1 << 14;

  /// r = s and eta = 1/s for a Hoelder exponent s in (1/2, 1].
  static LevelSchedule for_holder(double s);

  /// Throws std::invalid_argument unless r > 0, 2/(1+2r) <= eta < 2, c1, c2 >= 0, n_max >= 1.
  void validate() const;
};

/// Uncapped level; may exceed n_max.
long long n_of_uncapped(double alpha, double delta, const LevelSchedule& sched);

/// Level capped at n_max (a warning is logged once per process when the cap bites).
int n_of(double alpha, double delta, const LevelSchedule& sched);

/// Smallest power of two >= n, so that every level nests into the finest one.
int dyadic_level(int n);

/// Dyadic level actually used for (alpha, delta): dyadic_level(n_of(...)), capped at n_max.
int level_of(double alpha, double delta, const LevelSchedule& sched);

/// Orthogonal projection Q onto the coarse indicator system; requires nested grids.
L2Vector project(const L2Vector& fine, int n_coarse);
Observation project(const Observation& obs_fine, int n_coarse);

}  // namespace statreg
