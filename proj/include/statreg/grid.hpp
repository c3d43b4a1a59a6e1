#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace statreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Equidistant partition 0 = t_0 < t_1 < ... < t_n = 1 of the unit interval.
class Grid {
 public:
  explicit Grid(int n_cells);

  int n_cells() const { return n_; }
  double width() const { return 1.0 / static_cast<double>(n_); }
  /// Node t_j = j/n, j = 0..n.
  double node(int j) const;
  /// Midpoint of cell j (1-based, cell j = [t_{j-1}, t_j)).
  double midpoint(int j) const;

  /// True if every cell of *this is a union of cells of `finer`.
  bool nests_into(const Grid& finer) const { return finer.n_ % n_ == 0; }

  bool operator==(const Grid& other) const { return n_ == other.n_; }

 private:
  int n_;
};

/// Element of span{phi_1..phi_n}, phi_j = sqrt(n) * indicator of cell j,
/// stored by its coefficients against that orthonormal system.
struct L2Vector {
  Grid grid;
  Vector coeffs;

  L2Vector(Grid g, Vector c);
  static L2Vector zero(Grid g) { return L2Vector(g, Vector::Zero(g.n_cells())); }

  double norm() const { return coeffs.norm(); }
  double norm_sq() const { return coeffs.squaredNorm(); }
};

/// Cell heights of the piecewise-constant function (sqrt(n) * coefficient).
Vector cell_values(const L2Vector& f);
L2Vector from_cell_values(const Grid& grid, const Vector& values);

/// Embeds a coarse piecewise-constant function exactly into a nested finer grid.
L2Vector prolongate(const L2Vector& coarse, const Grid& fine);

/// L2 distance between two piecewise-constant functions on nested grids.
double l2_distance(const L2Vector& a, const L2Vector& b);

}  // namespace statreg
