#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace oscneg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown when a matrix required to be positive definite is not; carries
/// the offending smallest eigenvalue so callers can report it.
class not_positive_definite : public std::runtime_error {
 public:
  not_positive_definite(const std::string& what, double min_eig)
      : std::runtime_error(what), min_eig_(min_eig) {}
  double min_eig() const { return min_eig_; }

 private:
  double min_eig_;
};

/// Thrown when a computed quantity violates a consistency requirement
/// (residuals, symplectic eigenvalues of a state below 1, ...).
class numerical_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // columns
};

/// Symmetric eigendecomposition (input is symmetrized first).
SymmetricEigen sym_eig(const Matrix& a);

/// max |eigenvalue| computed from an eigendecomposition.
double spectral_norm(const SymmetricEigen& e);

/// ||V D V^T - A|| / ||A|| and ||V^T V - I||, used for residual gates.
double reconstruction_residual(const SymmetricEigen& e, const Matrix& a);
double orthogonality_residual(const SymmetricEigen& e);

inline Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// V f(D) V^T for a scalar function f applied to the eigenvalues.
template <class F>
Matrix eigen_apply(const SymmetricEigen& e, F&& f) {
  Vector fd(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) fd[i] = f(e.values[i]);
  return symmetrized(e.vectors * fd.asDiagonal() * e.vectors.transpose());
}

/// Symmetric square root of a positive semi-definite matrix.
Matrix sqrt_spd(const Matrix& a);

}  // namespace oscneg
