#pragma once

#include "statreg/grid.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>

namespace statreg {

/// Singular values at or below tol_svd * s_1 are treated as zero.
inline constexpr double kTolSvd = 1e-10;

/// Singular system {(s_j; v_j, u_j)} of a discretized operator, s_1 >= s_2 >= ... >= 0.
/// Columns of `u` span the range side, columns of `v` the domain side.
struct SingularSystem {
  Vector values;
  Matrix u;
  Matrix v;
  int rank = 0;
};

/// Galerkin matrix of a compact operator T on L2[0,1] in the indicator basis
/// of a grid, together with its cached SVD. Immutable after construction.
class DiscreteOperator {
 public:
  DiscreteOperator(Grid grid, Matrix matrix, std::optional<double> holder_s = std::nullopt);

  const Grid& grid() const { return grid_; }
  int size() const { return grid_.n_cells(); }
  const Matrix& matrix() const { return matrix_; }
  const SingularSystem& svd() const { return svd_; }
  const Vector& singular_values() const { return svd_.values; }
  int rank() const { return svd_.rank; }
  /// Spectral norm ||T|| = s_1.
  double norm() const { return svd_.values.size() > 0 ? svd_.values[0] : 0.0; }
  double hs_norm() const { return hs_norm_; }
  /// Hoelder exponent asserted by the builder, if any.
  std::optional<double> holder_exponent() const { return holder_s_; }
  /// B^T B, used by the normal-equation solver.
  const Matrix& gram() const { return gram_; }

 private:
  Grid grid_;
  Matrix matrix_;
  SingularSystem svd_;
  double hs_norm_ = 0.0;
  std::optional<double> holder_s_;
  Matrix gram_;
};

using Kernel = std::function<double(double t, double u)>;

/// Volterra: (Tx)(t) = int_0^t k(t,u) x(u) du.  Fredholm: integral over [0,1].
enum class KernelSupport { volterra, fredholm };

/// Galerkin matrix of the kernel operator via cell-midpoint evaluation of k.
/// The diagonal cells of a Volterra operator integrate over the lower triangle
/// exactly, so constant kernels are reproduced without error.
Matrix galerkin_matrix(const Grid& grid, const Kernel& kernel, KernelSupport support);

/// (Tx)(t) = int_0^t x(u) du, assembled in closed form.
DiscreteOperator build_integration_operator(const Grid& grid);

/// Kernel operator with a caller-asserted Hoelder exponent in (1/2, 1].
DiscreteOperator build_holder_kernel_operator(const Grid& grid, const Kernel& kernel,
                                              double holder_s,
                                              KernelSupport support = KernelSupport::volterra);

L2Vector apply(const DiscreteOperator& op, const L2Vector& x);
L2Vector apply_adjoint(const DiscreteOperator& op, const L2Vector& y);

/// sum_{j < gains.size()} gains[j] <y, u_j> v_j. Shared by every spectral
/// solution map so that identical gains give bit-identical results.
Vector spectral_series(const DiscreteOperator& op, const Vector& y, std::span<const double> gains);

/// Truncated Moore-Penrose inverse sum_{j <= trunc} s_j^{-1} <y,u_j> v_j.
L2Vector generalized_inverse_apply(const DiscreteOperator& op, const L2Vector& y, int trunc);
L2Vector generalized_inverse_apply(const DiscreteOperator& op, const L2Vector& y);

/// Spectral norm of (I - Q_n) T measured on the finer reference operator,
/// where Q_n projects onto the grid of `op`.
double discretization_defect(const DiscreteOperator& op, const DiscreteOperator& full_op);

/// Flat matrix file: a header line "n=<int>" followed by n comma-separated rows.
void write_operator_csv(const DiscreteOperator& op, std::ostream& out);
DiscreteOperator read_operator_csv(std::istream& in);

/// Smoothness class T_phi(R) = { phi(T*T) v : ||v|| <= R }.
struct SourceCondition {
  enum class Kind { holder, custom };

  Kind kind = Kind::holder;
  double nu = 0.5;
  double radius = 1.0;
  std::function<double(double)> phi;

  static SourceCondition holder(double nu, double radius);
  static SourceCondition custom(std::function<double(double)> phi, double radius);

  double operator()(double t) const { return phi(t); }
};

/// Lazily built, cached family of discretizations {T_n} of one operator, keyed by
/// the number of cells. Safe to query from several threads.
class OperatorLevels {
 public:
  using Builder = std::function<DiscreteOperator(const Grid&)>;

  explicit OperatorLevels(Builder builder) : builder_(std::move(builder)) {}

  std::shared_ptr<const DiscreteOperator> at(int n) const;

 private:
  Builder builder_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::shared_ptr<const DiscreteOperator>> cache_;
};

}  // namespace statreg
