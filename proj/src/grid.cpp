#include "statreg/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace statreg {

Grid::Grid(int n_cells) : n_(n_cells) {
  if (n_cells < 1) {
    throw std::invalid_argument("grid needs at least one cell, got " + std::to_string(n_cells));
  }
}

double Grid::node(int j) const {
  if (j < 0 || j > n_) throw std::out_of_range("grid node index out of range");
  return static_cast<double>(j) / static_cast<double>(n_);
}

double Grid::midpoint(int j) const {
  if (j < 1 || j > n_) throw std::out_of_range("grid cell index out of range");
  return (static_cast<double>(j) - 0.5) / static_cast<double>(n_);
}

L2Vector::L2Vector(Grid g, Vector c) : grid(g), coeffs(std::move(c)) {
  if (coeffs.size() != grid.n_cells()) {
    throw std::invalid_argument("coefficient vector length does not match grid");
  }
}

Vector cell_values(const L2Vector& f) {
  return std::sqrt(static_cast<double>(f.grid.n_cells())) * f.coeffs;
}

L2Vector from_cell_values(const Grid& grid, const Vector& values) {
  return L2Vector(grid, values / std::sqrt(static_cast<double>(grid.n_cells())));
}

L2Vector prolongate(const L2Vector& coarse, const Grid& fine) {
  if (!coarse.grid.nests_into(fine)) {
    throw std::invalid_argument("prolongation requires nested grids");
  }
  const int block = fine.n_cells() / coarse.grid.n_cells();
  const double scale = 1.0 / std::sqrt(static_cast<double>(block));
  Vector out(fine.n_cells());
  for (int i = 0; i < coarse.grid.n_cells(); ++i) {
    out.segment(static_cast<Eigen::Index>(i) * block, block).setConstant(scale * coarse.coeffs[i]);
  }
  return L2Vector(fine, std::move(out));
}

double l2_distance(const L2Vector& a, const L2Vector& b) {
  if (a.grid == b.grid) return (a.coeffs - b.coeffs).norm();
  if (a.grid.nests_into(b.grid)) return (prolongate(a, b.grid).coeffs - b.coeffs).norm();
  if (b.grid.nests_into(a.grid)) return (a.coeffs - prolongate(b, a.grid).coeffs).norm();
  throw std::invalid_argument("l2_distance requires nested grids");
}

}  // namespace statreg
