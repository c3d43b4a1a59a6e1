#include "statreg/discretization.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace statreg {

namespace {

// ceil() that ignores representation noise of order 1e-12 in x, so that
// e.g. (1e-4)^(-1/2) gives 100 and not 101.
long long snapped_ceil(double x) {
  return static_cast<long long>(std::ceil(x * (1.0 - 1e-12)));
}

std::atomic<bool> g_cap_warned{false};

}  // namespace

LevelSchedule LevelSchedule::for_holder(double s) {
  if (!(s > 0.5 && s <= 1.0)) throw std::invalid_argument("Hoelder exponent must lie in (1/2, 1]");
  LevelSchedule sched;
  sched.r = s;
  sched.eta = 1.0 / s;
  return sched;
}

void LevelSchedule::validate() const {
  if (!(r > 0.0)) throw std::invalid_argument("schedule: r must be positive");
  if (!(eta >= 2.0 / (1.0 + 2.0 * r) - 1e-15 && eta < 2.0)) {
    throw std::invalid_argument("schedule: eta must satisfy 2/(1+2r) <= eta < 2");
  }
  if (!(c1 >= 0.0 && c2 >= 0.0)) throw std::invalid_argument("schedule: c1, c2 must be nonnegative");
  if (n_max < 1) throw std::invalid_argument("schedule: n_max must be positive");
}

long long n_of_uncapped(double alpha, double delta, const LevelSchedule& sched) {
  if (!(alpha > 0.0) || !(delta > 0.0)) {
    throw std::invalid_argument("n(alpha, delta) needs alpha > 0 and delta > 0");
  }
  const long long n1 = snapped_ceil(sched.c1 * std::pow(alpha, -1.0 / (2.0 * sched.r)));
  const long long n2 = sched.c2 > 0.0 ? snapped_ceil(sched.c2 * std::pow(delta, -sched.eta)) : 0;
  return std::max({n1, n2, 1LL});
}

int n_of(double alpha, double delta, const LevelSchedule& sched) {
  const long long n = n_of_uncapped(alpha, delta, sched);
  if (n > sched.n_max) {
    if (!g_cap_warned.exchange(true)) {
      std::cerr << "warning: discretization level " << n << " capped at n_max = " << sched.n_max
                << '\n';
    }
    return sched.n_max;
  }
  return static_cast<int>(n);
}

int dyadic_level(int n) {
  if (n < 1) throw std::invalid_argument("level must be positive");
  int level = 1;
  while (level < n) level *= 2;
  return level;
}

int level_of(double alpha, double delta, const LevelSchedule& sched) {
  const int level = dyadic_level(n_of(alpha, delta, sched));
  return std::min(level, sched.n_max);
}

L2Vector project(const L2Vector& fine, int n_coarse) {
  const Grid coarse(n_coarse);
  if (!coarse.nests_into(fine.grid)) {
    throw std::invalid_argument("projection needs the coarse grid nested in the fine grid");
  }
  const int block = fine.grid.n_cells() / n_coarse;
  const double scale = 1.0 / std::sqrt(static_cast<double>(block));
  Vector out(n_coarse);
  for (int i = 0; i < n_coarse; ++i) {
    out[i] = scale * fine.coeffs.segment(static_cast<Eigen::Index>(i) * block, block).sum();
  }
  return L2Vector(coarse, std::move(out));
}

Observation project(const Observation& obs_fine, int n_coarse) {
  const L2Vector y = project(obs_fine.y_exact, n_coarse);
  const L2Vector data = project(L2Vector(obs_fine.grid, obs_fine.coeffs), n_coarse);
  Observation out = obs_fine;
  out.grid = y.grid;
  out.y_exact = y;
  out.coeffs = data.coeffs;
  return out;
}

}  // namespace statreg
