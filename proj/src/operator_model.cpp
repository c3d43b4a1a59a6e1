#include "statreg/operator_model.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace statreg {

namespace {

SingularSystem compute_svd(const Matrix& m) {
  SingularSystem sys;
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  sys.values = svd.singularValues();
  sys.u = svd.matrixU();
  sys.v = svd.matrixV();
  const double s1 = sys.values.size() > 0 ? sys.values[0] : 0.0;
  sys.rank = 0;
  if (s1 > 0.0) {
    for (Eigen::Index j = 0; j < sys.values.size(); ++j) {
      if (sys.values[j] > kTolSvd * s1) ++sys.rank;
    }
  }
  return sys;
}

}  // namespace

DiscreteOperator::DiscreteOperator(Grid grid, Matrix matrix, std::optional<double> holder_s)
    : grid_(grid), matrix_(std::move(matrix)), holder_s_(holder_s) {
  if (matrix_.rows() != grid_.n_cells() || matrix_.cols() != grid_.n_cells()) {
    throw std::invalid_argument("operator matrix must be n x n for an n-cell grid");
  }
  if (!matrix_.allFinite()) throw std::invalid_argument("operator matrix has non-finite entries");
  svd_ = compute_svd(matrix_);
  hs_norm_ = std::sqrt(svd_.values.squaredNorm());
  gram_ = matrix_.transpose() * matrix_;
}

Matrix galerkin_matrix(const Grid& grid, const Kernel& kernel, KernelSupport support) {
  const int n = grid.n_cells();
  const double h = grid.width();
  Matrix m = Matrix::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    const double t = grid.midpoint(i);
    const int last = support == KernelSupport::volterra ? i : n;
    for (int j = 1; j <= last; ++j) {
      const double k = kernel(t, grid.midpoint(j));
      // <T phi_j, phi_i> = n * int_{cell i} int_{cell j, u < t} k du dt
      const double weight = (support == KernelSupport::volterra && j == i) ? 0.5 * h : h;
      m(i - 1, j - 1) = k * weight;
    }
  }
  return m;
}

DiscreteOperator build_integration_operator(const Grid& grid) {
  const int n = grid.n_cells();
  const double h = grid.width();
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) m(i, j) = h;
    m(i, i) = 0.5 * h;
  }
  return DiscreteOperator(grid, std::move(m), 1.0);
}

DiscreteOperator build_holder_kernel_operator(const Grid& grid, const Kernel& kernel,
                                              double holder_s, KernelSupport support) {
  if (!(holder_s > 0.5 && holder_s <= 1.0)) {
    throw std::invalid_argument("Hoelder exponent must lie in (1/2, 1]");
  }
  return DiscreteOperator(grid, galerkin_matrix(grid, kernel, support), holder_s);
}

L2Vector apply(const DiscreteOperator& op, const L2Vector& x) {
  if (!(x.grid == op.grid())) throw std::invalid_argument("apply: dimension mismatch");
  return L2Vector(op.grid(), op.matrix() * x.coeffs);
}

L2Vector apply_adjoint(const DiscreteOperator& op, const L2Vector& y) {
  if (!(y.grid == op.grid())) throw std::invalid_argument("apply_adjoint: dimension mismatch");
  return L2Vector(op.grid(), op.matrix().transpose() * y.coeffs);
}

Vector spectral_series(const DiscreteOperator& op, const Vector& y, std::span<const double> gains) {
  const auto& sys = op.svd();
  if (y.size() != op.size()) throw std::invalid_argument("spectral_series: dimension mismatch");
  if (static_cast<int>(gains.size()) > sys.rank) {
    throw std::invalid_argument("spectral_series: more gains than nonzero singular values");
  }
  const auto k = static_cast<Eigen::Index>(gains.size());
  Vector coeffs = sys.u.leftCols(k).transpose() * y;
  for (Eigen::Index j = 0; j < k; ++j) coeffs[j] *= gains[static_cast<std::size_t>(j)];
  return sys.v.leftCols(k) * coeffs;
}

L2Vector generalized_inverse_apply(const DiscreteOperator& op, const L2Vector& y, int trunc) {
  if (!(y.grid == op.grid())) throw std::invalid_argument("generalized inverse: dimension mismatch");
  if (trunc < 0 || trunc > op.rank()) {
    throw std::invalid_argument("truncation index " + std::to_string(trunc) +
                                " exceeds operator rank " + std::to_string(op.rank()));
  }
  std::vector<double> gains(static_cast<std::size_t>(trunc));
  for (int j = 0; j < trunc; ++j) gains[static_cast<std::size_t>(j)] = 1.0 / op.singular_values()[j];
  return L2Vector(op.grid(), spectral_series(op, y.coeffs, gains));
}

L2Vector generalized_inverse_apply(const DiscreteOperator& op, const L2Vector& y) {
  return generalized_inverse_apply(op, y, op.rank());
}

double discretization_defect(const DiscreteOperator& op, const DiscreteOperator& full_op) {
  if (!op.grid().nests_into(full_op.grid())) {
    throw std::invalid_argument("discretization defect needs the coarse grid nested in the reference grid");
  }
  const int n_fine = full_op.size();
  const int block = n_fine / op.size();
  // Q_n on the fine grid: block averaging of coefficients.
  Matrix residual = full_op.matrix();
  for (int b = 0; b < op.size(); ++b) {
    auto rows = residual.middleRows(static_cast<Eigen::Index>(b) * block, block);
    const Eigen::RowVectorXd mean = rows.colwise().mean();
    rows.rowwise() -= mean;
  }
  Eigen::BDCSVD<Matrix> svd(residual);
  return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

void write_operator_csv(const DiscreteOperator& op, std::ostream& out) {
  const auto& m = op.matrix();
  out << "n=" << op.size() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

DiscreteOperator read_operator_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("n=", 0) != 0) {
    throw std::invalid_argument("operator file must start with a header line n=<int>");
  }
  int n = 0;
  try {
    n = std::stoi(line.substr(2));
  } catch (const std::exception&) {
    throw std::invalid_argument("operator file header is not n=<int>: " + line);
  }
  Grid grid(n);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw std::invalid_argument("operator file truncated");
    std::istringstream row(line);
    std::string cell;
    for (int j = 0; j < n; ++j) {
      if (!std::getline(row, cell, ',')) throw std::invalid_argument("operator file row too short");
      m(i, j) = std::stod(cell);
    }
  }
  return DiscreteOperator(grid, std::move(m));
}

SourceCondition SourceCondition::holder(double nu, double radius) {
  if (!(nu > 0.0)) throw std::invalid_argument("Hoelder source exponent must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("source radius must be positive");
  SourceCondition sc;
  sc.kind = Kind::holder;
  sc.nu = nu;
  sc.radius = radius;
  sc.phi = [nu](double t) { return std::pow(t, nu); };
  return sc;
}

SourceCondition SourceCondition::custom(std::function<double(double)> phi, double radius) {
  if (!phi) throw std::invalid_argument("custom source condition needs a function");
  if (!(radius > 0.0)) throw std::invalid_argument("source radius must be positive");
  SourceCondition sc;
  sc.kind = Kind::custom;
  sc.nu = 0.0;
  sc.radius = radius;
  sc.phi = std::move(phi);
  return sc;
}


std::shared_ptr<const DiscreteOperator> OperatorLevels::at(int n) const {
  {
    const std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = cache_.find(n); it != cache_.end()) return it->second;
  }
  auto built = std::make_shared<const DiscreteOperator>(builder_(Grid(n)));
  const std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(n, std::move(built)).first->second;
}

}  // namespace statreg
