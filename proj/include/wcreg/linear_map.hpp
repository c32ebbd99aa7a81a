#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>

#include "wcreg/grid.hpp"

namespace wcreg {

/// A linear operator on grid functions: either the built-in trapezoid
/// integration map (matrix-free, any grid size) or an explicit n x n matrix.
class LinearMap {
 public:
  static LinearMap integration() { return LinearMap(); }
  /// Throws PreconditionError unless the matrix is square with finite entries.
  static LinearMap matrix(Eigen::MatrixXd m);
  static LinearMap identity(std::size_t n) { return matrix(Eigen::MatrixXd::Identity(n, n)); }

  bool is_integration() const noexcept { return !matrix_.has_value(); }
  const std::optional<Eigen::MatrixXd>& explicit_matrix() const noexcept { return matrix_; }

  /// Throws GridMismatchError when an explicit matrix does not match v.
  GridFunction apply(const GridFunction& v) const;
  GridFunction apply_transpose(const GridFunction& r) const;

  /// Dense matrix on an n-node grid (materializes the integration map).
  Eigen::MatrixXd dense(std::size_t n) const;

  /// Rank test of the dense matrix on an n-node grid.
  bool injective_on(std::size_t n) const;

 private:
  LinearMap() = default;
  explicit LinearMap(Eigen::MatrixXd m) : matrix_(std::move(m)) {}

  void check_size(std::size_t n) const;

  std::optional<Eigen::MatrixXd> matrix_;
};

}  // namespace wcreg
