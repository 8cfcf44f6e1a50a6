#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "oscneg/linalg.hpp"
#include "oscneg/oscillator.hpp"

namespace oscneg {

using ComplexMatrix = Eigen::MatrixXcd;

/// Single bosonic mode truncated to the lowest `dim` number states.
/// a lowers (a|n> = sqrt(n)|n-1>), q = (a + a^dag)/sqrt(2),
/// p = (a - a^dag)/(i sqrt(2)).
struct TruncatedMode {
  int dim;
  ComplexMatrix a;
  ComplexMatrix q;
  ComplexMatrix p;

  explicit TruncatedMode(int dim);
};

/// Truncated Weyl operator exp(i(Re z * q + Im z * p)), built by
/// exponentiating the Hermitian generator. Unitary up to the truncation
/// tail.
ComplexMatrix weyl_matrix(std::complex<double> z, const TruncatedMode& mode);

/// The diagonal single-mode operator with Tr[rho_lambda W(z)] =
/// exp(-lambda |z|^2 / 4): entries (1 - alpha) alpha^n with
/// alpha = (lambda-1)/(lambda+1).
struct RhoLambda {
  double lambda;
  double alpha;
  Vector diag;

  RhoLambda(double lambda, int dim);
  double trace() const;       // 1 - alpha^dim (truncation deficit reported)
  double trace_norm() const;  // sum of |eigenvalues|
};

/// |Tr(rho_lambda W(z)) - exp(-lambda |z|^2 / 4)| at the given truncation.
double verify_gaussian_char(double lambda, std::complex<double> z, int dim);

/// Kronecker products used to lift single-mode operators.
Matrix kron(const Matrix& a, const Matrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Partial transpose of a matrix on the product basis of `n_sites` modes
/// of local dimension `dim`, transposing the components in `sites_a`
/// (matrix-element swap semantics).
Matrix partial_transpose(const Matrix& rho, int n_sites, int dim,
                         const std::vector<int>& sites_a);

struct BruteResult {
  double negativity = 0.0;
  std::optional<double> entropy;  // ground states only
  double ground_energy = 0.0;
  int dim = 0;
};

/// Brute-force negativity (and entropy, ground case) in the truncated
/// number basis: assemble H = q^T hq q + p^T hp p, take the lowest
/// eigenvector (or exp(-beta H)/Z when sys.beta is set), partially
/// transpose on region0 and return log of the trace norm. Capped at 3
/// modes and 1e5 basis states.
BruteResult brute_negativity(const OscillatorSystem& sys, int dim_per_mode);

struct BruteConvergence {
  BruteResult coarse;
  BruteResult fine;
  double delta_negativity = 0.0;
  double delta_entropy = 0.0;
  bool converged = false;
};

/// Runs the oracle at dim and dim + step and compares; `converged` is
/// false when successive dims differ by more than tol (flagged, never
/// silently accepted).
BruteConvergence brute_negativity_converged(const OscillatorSystem& sys, int dim_per_mode,
                                            int step, double tol);

}  // namespace oscneg
