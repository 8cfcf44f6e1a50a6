#include "oscneg/fock_oracle.hpp"

#include <lapacke.h>

#include <Eigen/Sparse>
#include <cmath>
#include <stdexcept>
#include <string>

namespace oscneg {

namespace {

constexpr int kMaxModes = 3;
constexpr int kMaxBasisStates = 100000;
constexpr int kLapackThreshold = 512;

// Symmetric eigendecomposition dispatching to LAPACK's divide and conquer
// driver for the large dense matrices the oracle produces.
void dense_sym_eig(Matrix& a, Vector& w, bool want_vectors) {
  const int n = static_cast<int>(a.rows());
  w.resize(n);
  if (n < kLapackThreshold) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(
        a, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw numerical_error("oracle eigendecomposition failed");
    w = solver.eigenvalues();
    if (want_vectors) a = solver.eigenvectors();
    return;
  }
  int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n,
                            a.data(), n, w.data());
  if (info != 0)
    throw numerical_error("LAPACK dsyevd failed with info " + std::to_string(info));
}

using Sparse = Eigen::SparseMatrix<double>;

Sparse sparse_identity(int n) {
  Sparse id(n, n);
  id.setIdentity();
  return id;
}

Sparse sparse_kron(const Sparse& a, const Sparse& b) {
  Sparse out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (Sparse::InnerIterator ia(a, ka); ia; ++ia) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (Sparse::InnerIterator ib(b, kb); ib; ++ib) {
          triplets.emplace_back(ia.row() * b.rows() + ib.row(),
                                ia.col() * b.cols() + ib.col(),
                                ia.value() * ib.value());
        }
      }
    }
  }
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

// Lift a single-mode operator to mode `site` of an n_sites product space,
// site 0 being the slowest index.
Sparse lift(const Sparse& op, int n_sites, int dim, int site) {
  int left = 1;
  for (int s = 0; s < site; ++s) left *= dim;
  int right = 1;
  for (int s = site + 1; s < n_sites; ++s) right *= dim;
  Sparse out = op;
  if (left > 1) out = sparse_kron(sparse_identity(left), out);
  if (right > 1) out = sparse_kron(out, sparse_identity(right));
  return out;
}

}  // namespace

TruncatedMode::TruncatedMode(int dim_in) : dim(dim_in) {
  if (dim < 2) throw std::invalid_argument("truncated mode needs dim >= 2");
  a = ComplexMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  ComplexMatrix adag = a.adjoint();
  q = (a + adag) / std::sqrt(2.0);
  p = (a - adag) / std::complex<double>(0.0, std::sqrt(2.0));
}

ComplexMatrix weyl_matrix(std::complex<double> z, const TruncatedMode& mode) {
  ComplexMatrix generator = z.real() * mode.q + z.imag() * mode.p;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(generator);
  if (solver.info() != Eigen::Success)
    throw numerical_error("Weyl generator eigendecomposition failed");
  Eigen::VectorXcd phases(mode.dim);
  for (int i = 0; i < mode.dim; ++i)
    phases[i] = std::exp(std::complex<double>(0.0, solver.eigenvalues()[i]));
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

RhoLambda::RhoLambda(double lambda_in, int dim) : lambda(lambda_in) {
  if (!(lambda > 0)) throw std::invalid_argument("rho_lambda needs lambda > 0");
  if (dim < 1) throw std::invalid_argument("rho_lambda needs dim >= 1");
  alpha = (lambda - 1.0) / (lambda + 1.0);
  diag.resize(dim);
  double power = 1.0;
  for (int n = 0; n < dim; ++n) {
    diag[n] = (1.0 - alpha) * power;
    power *= alpha;
  }
}

double RhoLambda::trace() const { return diag.sum(); }

double RhoLambda::trace_norm() const { return diag.cwiseAbs().sum(); }

double verify_gaussian_char(double lambda, std::complex<double> z, int dim) {
  RhoLambda rho(lambda, dim);
  TruncatedMode mode(dim);
  ComplexMatrix w = weyl_matrix(z, mode);
  std::complex<double> trace = 0.0;
  for (int n = 0; n < dim; ++n) trace += rho.diag[n] * w(n, n);
  double expected = std::exp(-lambda * std::norm(z) / 4.0);
  return std::abs(trace - expected);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix partial_transpose(const Matrix& rho, int n_sites, int dim,
                         const std::vector<int>& sites_a) {
  long total = 1;
  std::vector<long> stride(n_sites);
  for (int s = n_sites - 1; s >= 0; --s) {
    stride[s] = total;
    total *= dim;
  }
  if (rho.rows() != total || rho.cols() != total)
    throw std::invalid_argument("partial_transpose: matrix size does not match the basis");

  std::vector<char> in_a(n_sites, 0);
  for (int s : sites_a) {
    if (s < 0 || s >= n_sites) throw std::invalid_argument("partial_transpose: bad site");
    in_a[s] = 1;
  }

  // Contribution of the transposed components to each basis index.
  std::vector<long> a_part(total, 0);
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    long acc = 0;
    for (int s = 0; s < n_sites; ++s) {
      long digit = rest / stride[s];
      rest %= stride[s];
      if (in_a[s]) acc += digit * stride[s];
    }
    a_part[idx] = acc;
  }

  Matrix out(total, total);
  for (long j = 0; j < total; ++j) {
    long aj = a_part[j];
    long bj = j - aj;
    for (long i = 0; i < total; ++i) {
      long ai = a_part[i];
      out(i, j) = rho(aj + (i - ai), ai + bj);
    }
  }
  return out;
}

BruteResult brute_negativity(const OscillatorSystem& sys, int dim_per_mode) {
  const int n_sites = sys.graph->n_vertices();
  if (n_sites > kMaxModes)
    throw std::invalid_argument("brute-force oracle is capped at 3 modes");
  if (dim_per_mode < 2) throw std::invalid_argument("oracle needs dim_per_mode >= 2");
  long total = 1;
  for (int s = 0; s < n_sites; ++s) {
    total *= dim_per_mode;
    if (total > kMaxBasisStates)
      throw std::invalid_argument("oracle basis exceeds 1e5 states");
  }

  // Real single-mode blocks: q is symmetric, p = i*b with b antisymmetric,
  // so q^T hq q - b^T hp b is the full (real) Hamiltonian matrix.
  Sparse q1(dim_per_mode, dim_per_mode), b1(dim_per_mode, dim_per_mode);
  {
    std::vector<Eigen::Triplet<double>> tq, tb;
    for (int n = 1; n < dim_per_mode; ++n) {
      double v = std::sqrt(static_cast<double>(n) / 2.0);
      tq.emplace_back(n - 1, n, v);
      tq.emplace_back(n, n - 1, v);
      tb.emplace_back(n, n - 1, v);
      tb.emplace_back(n - 1, n, -v);
    }
    q1.setFromTriplets(tq.begin(), tq.end());
    b1.setFromTriplets(tb.begin(), tb.end());
  }

  std::vector<Sparse> q_ops, b_ops;
  for (int s = 0; s < n_sites; ++s) {
    q_ops.push_back(lift(q1, n_sites, dim_per_mode, s));
    b_ops.push_back(lift(b1, n_sites, dim_per_mode, s));
  }

  Sparse h_sparse(total, total);
  for (int x = 0; x < n_sites; ++x) {
    for (int y = 0; y < n_sites; ++y) {
      if (sys.hq(x, y) != 0.0) h_sparse += sys.hq(x, y) * (q_ops[x] * q_ops[y]);
      if (sys.hp(x, y) != 0.0) h_sparse -= sys.hp(x, y) * (b_ops[x] * b_ops[y]);
    }
  }

  Matrix h = Matrix(h_sparse);
  h = symmetrized(h);
  Vector energies;
  dense_sym_eig(h, energies, true);  // h now holds the eigenvectors

  BruteResult result;
  result.dim = dim_per_mode;
  result.ground_energy = energies[0];

  Matrix rho;
  if (sys.beta) {
    double beta = *sys.beta;
    // Drop eigenstates with negligible Boltzmann weight before forming rho.
    Vector weights(total);
    for (long j = 0; j < total; ++j)
      weights[j] = std::exp(-beta * (energies[j] - energies[0]));
    double z = weights.sum();
    long keep = total;
    while (keep > 1 && weights[keep - 1] / z < 1e-18) --keep;
    rho.noalias() = h.leftCols(keep) * (weights.head(keep) / z).asDiagonal() *
                    h.leftCols(keep).transpose();
  } else {
    rho.noalias() = h.col(0) * h.col(0).transpose();
  }

  Matrix rho_pt = partial_transpose(rho, n_sites, dim_per_mode, sys.region0.members);
  Vector pt_eigs;
  dense_sym_eig(rho_pt, pt_eigs, false);
  result.negativity = std::log(pt_eigs.cwiseAbs().sum());

  if (!sys.beta) {
    // Reduced ground state on region0, by partial trace over the rest.
    const std::vector<int>& a_sites = sys.region0.members;
    int k_a = static_cast<int>(a_sites.size());
    long d_a = 1;
    for (int s = 0; s < k_a; ++s) d_a *= dim_per_mode;
    long d_b = total / d_a;

    std::vector<long> stride(n_sites);
    long run = 1;
    for (int s = n_sites - 1; s >= 0; --s) {
      stride[s] = run;
      run *= dim_per_mode;
    }
    std::vector<char> in_a(n_sites, 0);
    for (int s : a_sites) in_a[s] = 1;
    std::vector<int> b_sites;
    for (int s = 0; s < n_sites; ++s)
      if (!in_a[s]) b_sites.push_back(s);

    auto compose = [&](long a_idx, long b_idx) {
      long idx = 0;
      for (int s = k_a - 1; s >= 0; --s) {
        idx += (a_idx % dim_per_mode) * stride[a_sites[s]];
        a_idx /= dim_per_mode;
      }
      for (int s = static_cast<int>(b_sites.size()) - 1; s >= 0; --s) {
        idx += (b_idx % dim_per_mode) * stride[b_sites[s]];
        b_idx /= dim_per_mode;
      }
      return idx;
    };

    Matrix rho_a = Matrix::Zero(d_a, d_a);
    for (long a1 = 0; a1 < d_a; ++a1) {
      for (long a2 = 0; a2 < d_a; ++a2) {
        double acc = 0.0;
        for (long b = 0; b < d_b; ++b) acc += rho(compose(a1, b), compose(a2, b));
        rho_a(a1, a2) = acc;
      }
    }
    Vector probs;
    dense_sym_eig(rho_a, probs, false);
    double entropy = 0.0;
    for (long i = 0; i < d_a; ++i) {
      if (probs[i] > 1e-15) entropy -= probs[i] * std::log(probs[i]);
    }
    result.entropy = entropy;
  }
  return result;
}

BruteConvergence brute_negativity_converged(const OscillatorSystem& sys, int dim_per_mode,
                                            int step, double tol) {
  BruteConvergence out;
  out.coarse = brute_negativity(sys, dim_per_mode);
  out.fine = brute_negativity(sys, dim_per_mode + step);
  out.delta_negativity = std::abs(out.fine.negativity - out.coarse.negativity);
  out.delta_entropy = (out.coarse.entropy && out.fine.entropy)
                          ? std::abs(*out.fine.entropy - *out.coarse.entropy)
                          : 0.0;
  out.converged = out.delta_negativity <= tol && out.delta_entropy <= tol;
  return out;
}

}  // namespace oscneg
