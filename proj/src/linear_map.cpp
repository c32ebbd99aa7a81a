#include "wcreg/linear_map.hpp"

#include <string>

#include "wcreg/error.hpp"

namespace wcreg {

LinearMap LinearMap::matrix(Eigen::MatrixXd m) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw PreconditionError("operator matrix must be square with at least 2 rows");
  }
  if (!m.allFinite()) throw PreconditionError("operator matrix entries must be finite");
  return LinearMap(std::move(m));
}

void LinearMap::check_size(std::size_t n) const {
  if (matrix_ && static_cast<std::size_t>(matrix_->rows()) != n) {
    throw GridMismatchError("operator matrix is " + std::to_string(matrix_->rows()) +
                            "x" + std::to_string(matrix_->cols()) + " but grid has " +
                            std::to_string(n) + " nodes");
  }
}

GridFunction LinearMap::apply(const GridFunction& v) const {
  if (!matrix_) return integrate(v);
  check_size(v.size());
  const Eigen::Map<const Eigen::VectorXd> x(v.values().data(), static_cast<Eigen::Index>(v.size()));
  const Eigen::VectorXd y = *matrix_ * x;
  return GridFunction(std::vector<double>(y.data(), y.data() + y.size()));
}

GridFunction LinearMap::apply_transpose(const GridFunction& r) const {
  if (!matrix_) return integrate_transpose(r);
  check_size(r.size());
  const Eigen::Map<const Eigen::VectorXd> x(r.values().data(), static_cast<Eigen::Index>(r.size()));
  const Eigen::VectorXd y = matrix_->transpose() * x;
  return GridFunction(std::vector<double>(y.data(), y.data() + y.size()));
}

Eigen::MatrixXd LinearMap::dense(std::size_t n) const {
  check_size(n);
  if (matrix_) return *matrix_;
  Eigen::MatrixXd m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const auto col = integrate(GridFunction(std::move(e)));
    for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return m;
}

bool LinearMap::injective_on(std::size_t n) const {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(dense(n));
  return lu.rank() == static_cast<Eigen::Index>(n);
}

}  // namespace wcreg
