#include "oscneg/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace oscneg {

SignMatrix SignMatrix::for_region(const Region& region0) {
  SignMatrix p;
  p.diag = Vector::Ones(region0.parent_size);
  for (int x : region0.members) p.diag[x] = -1.0;
  return p;
}

namespace {

bool is_scalar_matrix(const Matrix& a, double& scale) {
  scale = a(0, 0);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i == j ? a(i, j) != scale : a(i, j) != 0.0) return false;
  return true;
}

// hp^{1/2} A hp^{1/2} and hp^{-1/2} B hp^{-1/2}, with the exact scalar
// path when hp is a multiple of the identity.
struct HpSandwich {
  bool scalar = false;
  double scale = 0.0;  // hp = scale * I when scalar
  Matrix half;         // hp^{1/2}
  Matrix inv_half;     // hp^{-1/2}

  explicit HpSandwich(const Matrix& hp) {
    if (is_scalar_matrix(hp, scale)) {
      if (!(scale > 0)) throw not_positive_definite("hp is not positive", scale);
      scalar = true;
      return;
    }
    SymmetricEigen e = sym_eig(hp);
    if (!(e.values.minCoeff() > 0.0))
      throw not_positive_definite("hp is not positive definite", e.values.minCoeff());
    half = eigen_apply(e, [](double x) { return std::sqrt(x); });
    inv_half = eigen_apply(e, [](double x) { return 1.0 / std::sqrt(x); });
  }

  Matrix outer(const Matrix& a) const {
    if (scalar) return a * scale;
    return symmetrized(half * a * half);
  }
  Matrix inner(const Matrix& a) const {
    if (scalar) return a / scale;
    return symmetrized(inv_half * a * inv_half);
  }
};

Vector sorted_ascending(Vector v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

}  // namespace

CovariancePair covariance_blocks(const OscillatorSystem& sys,
                                 const EffectiveHamiltonian& h) {
  HpSandwich hp(sys.hp);
  CovariancePair out;
  if (sys.beta) {
    double beta = *sys.beta;
    out.kind = StateKind::thermal;
    out.beta = beta;
    out.m1 = hp.outer(apply(SpectralFunction::inv_sqrt_coth(beta), h));
    out.m2 = hp.inner(apply(SpectralFunction::sqrt_coth(beta), h));
  } else {
    out.kind = StateKind::ground;
    out.m1 = hp.outer(apply(SpectralFunction::inv_sqrt(), h));
    out.m2 = hp.inner(apply(SpectralFunction::sqrt(), h));
  }
  return out;
}

Matrix transposed_core(const CovariancePair& cov, const SignMatrix& p) {
  if (p.diag.size() != cov.m1.rows())
    throw std::invalid_argument("sign matrix size does not match the covariance blocks");
  Matrix m1_half = sqrt_spd(cov.m1);
  Matrix flipped = p.diag.asDiagonal() * cov.m2 * p.diag.asDiagonal();
  return symmetrized(m1_half * flipped * m1_half);
}

SymplecticSpectrum core_spectrum(const Matrix& core) {
  SymmetricEigen e = sym_eig(core);
  if (!(e.values.minCoeff() > 0.0))
    throw not_positive_definite("transposed core is not positive definite",
                                e.values.minCoeff());
  SymplecticSpectrum out;
  out.route = SymplecticRoute::block_shortcut;
  out.lambdas = e.values.cwiseSqrt();
  return out;
}

SymplecticSpectrum symplectic_spectrum(const Matrix& m1, const Matrix& m2,
                                       SymplecticRoute route) {
  if (m1.rows() != m2.rows())
    throw std::invalid_argument("covariance blocks must have equal size");
  const Eigen::Index n = m1.rows();

  SymmetricEigen e1 = sym_eig(m1);
  if (!(e1.values.minCoeff() > 0.0))
    throw not_positive_definite("M1 is not positive definite", e1.values.minCoeff());

  if (route == SymplecticRoute::block_shortcut) {
    Matrix m1_half = eigen_apply(e1, [](double x) { return std::sqrt(x); });
    return core_spectrum(symmetrized(m1_half * symmetrized(m2) * m1_half));
  }

  SymmetricEigen e2 = sym_eig(m2);
  if (!(e2.values.minCoeff() > 0.0))
    throw not_positive_definite("M2 is not positive definite", e2.values.minCoeff());
  Matrix a = eigen_apply(e1, [](double x) { return std::sqrt(x); });
  Matrix b = eigen_apply(e2, [](double x) { return std::sqrt(x); });

  // i M^{1/2} J M^{1/2} for M = diag(M1, M2) is the Hermitian matrix
  // [[0, -i A B], [i B A, 0]]; its spectrum is symmetric about 0.
  using ComplexMatrix = Eigen::MatrixXcd;
  const std::complex<double> iu(0.0, 1.0);
  ComplexMatrix k = ComplexMatrix::Zero(2 * n, 2 * n);
  k.topRightCorner(n, n) = -iu * (a * b);
  k.bottomLeftCorner(n, n) = iu * (b * a);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(k);
  if (solver.info() != Eigen::Success)
    throw numerical_error("symplectic eigensolve failed to converge");

  Vector positive(n);
  Eigen::Index taken = 0;
  for (Eigen::Index i = 0; i < 2 * n && taken < n; ++i) {
    // The 2n eigenvalues are (-lambda_j, lambda_j); keep the top half.
    if (i >= n) positive[taken++] = solver.eigenvalues()[i];
  }
  SymplecticSpectrum out;
  out.route = SymplecticRoute::general_jm;
  out.lambdas = sorted_ascending(positive);
  return out;
}

double log_negativity(const SymplecticSpectrum& spectrum, double clip_tol) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < spectrum.lambdas.size(); ++i) {
    double lambda = spectrum.lambdas[i];
    if (lambda < 1.0 - clip_tol) total += std::log(1.0 / lambda);
  }
  return total;
}

double entanglement_entropy(const CovariancePair& cov, const Region& region0) {
  if (cov.kind != StateKind::ground)
    throw std::invalid_argument("entanglement entropy is defined here for ground states only");
  if (region0.empty()) return 0.0;
  const int k = region0.size();
  Matrix m1(k, k), m2(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      m1(i, j) = cov.m1(region0.members[i], region0.members[j]);
      m2(i, j) = cov.m2(region0.members[i], region0.members[j]);
    }
  }
  SymplecticSpectrum reduced =
      symplectic_spectrum(m1, m2, SymplecticRoute::block_shortcut);
  double s = 0.0;
  for (Eigen::Index i = 0; i < reduced.lambdas.size(); ++i) {
    double nu = reduced.lambdas[i];
    if (nu < 1.0 - 1e-8) {
      throw numerical_error("reduced symplectic eigenvalue " + std::to_string(nu) +
                            " below 1: the restriction is not a state");
    }
    if (nu <= 1.0) continue;
    double up = 0.5 * (nu + 1.0);
    double dn = 0.5 * (nu - 1.0);
    s += up * std::log(up) - dn * std::log(dn);
  }
  return s;
}

double negativity_upper_bound(const OscillatorSystem& sys,
                              const EffectiveHamiltonian& h) {
  HpSandwich hp(sys.hp);
  Matrix m1_inv, m2_inv;
  if (sys.beta) {
    double beta = *sys.beta;
    m1_inv = hp.inner(apply(SpectralFunction::sqrt_tanh(beta), h));
    m2_inv = hp.outer(apply(SpectralFunction::inv_sqrt_tanh(beta), h));
  } else {
    m1_inv = hp.inner(apply(SpectralFunction::sqrt(), h));
    m2_inv = hp.outer(apply(SpectralFunction::inv_sqrt(), h));
  }
  double m1_inv_norm = spectral_norm(sym_eig(m1_inv));

  const Region& inner = sys.region0;
  const int n = inner.parent_size;
  std::vector<char> in(n, 0);
  for (int x : inner.members) in[x] = 1;
  double cross = 0.0;
  for (int x : inner.members) {
    for (int y = 0; y < n; ++y) {
      if (!in[y]) cross += std::abs(m2_inv(x, y));
    }
  }
  return 2.0 * m1_inv_norm * cross;
}

NegativityReport evaluate_sample(const OscillatorSystem& sys,
                                 const EffectiveHamiltonian& h) {
  NegativityReport report;
  report.sample_meta.condition_number = h.condition_number;
  report.sample_meta.min_eig = h.min_eig;

  CovariancePair cov = covariance_blocks(sys, h);
  SignMatrix p = SignMatrix::for_region(sys.region0);
  SymplecticSpectrum spectrum = core_spectrum(transposed_core(cov, p));

  report.negativity = log_negativity(spectrum);
  report.lambdas_below_one = 0;
  for (Eigen::Index i = 0; i < spectrum.lambdas.size(); ++i) {
    if (spectrum.lambdas[i] < 1.0 - kNegativityClipTol) ++report.lambdas_below_one;
  }
  if (cov.kind == StateKind::ground)
    report.entropy = entanglement_entropy(cov, sys.region0);
  report.upper_bound_lemma41 = negativity_upper_bound(sys, h);
  return report;
}

}  // namespace oscneg
