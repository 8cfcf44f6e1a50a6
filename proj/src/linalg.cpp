#include "oscneg/linalg.hpp"

#include <cmath>

namespace oscneg {

SymmetricEigen sym_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(a));
  if (solver.info() != Eigen::Success)
    throw numerical_error("symmetric eigendecomposition failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double spectral_norm(const SymmetricEigen& e) {
  return e.values.cwiseAbs().maxCoeff();
}

double reconstruction_residual(const SymmetricEigen& e, const Matrix& a) {
  Matrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  double scale = a.norm();
  if (scale == 0.0) return rebuilt.norm();
  return (rebuilt - a).norm() / scale;
}

double orthogonality_residual(const SymmetricEigen& e) {
  Matrix gram = e.vectors.transpose() * e.vectors;
  gram.diagonal().array() -= 1.0;
  return gram.norm();
}

Matrix sqrt_spd(const Matrix& a) {
  SymmetricEigen e = sym_eig(a);
  double min_eig = e.values.minCoeff();
  if (min_eig < -1e-12 * std::max(1.0, spectral_norm(e)))
    throw not_positive_definite("matrix square root of a non-PSD matrix", min_eig);
  return eigen_apply(e, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

}  // namespace oscneg
