#include "oscneg/oscillator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace oscneg {

HpSpec HpSpec::scalar(double m) {
  if (!(m > 0)) throw std::invalid_argument("mass must be positive");
  HpSpec s;
  s.kind = Kind::scalar;
  s.m = m;
  return s;
}

HpSpec HpSpec::band(double c, double delta) {
  if (!(c > 0)) throw std::invalid_argument("band hp needs c > 0");
  HpSpec s;
  s.kind = Kind::band;
  s.c = c;
  s.delta = delta;
  return s;
}

Matrix assemble_hq(const Graph& g, const std::vector<double>& k, double lambda,
                   double g_disorder) {
  const int n = g.n_vertices();
  if (static_cast<int>(k.size()) != n)
    throw std::invalid_argument("disorder sample length does not match the vertex count");
  Matrix hq = Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x) hq(x, x) = lambda * g.degree(x) + 0.5 * g_disorder * k[x];
  for (const auto& [u, v] : g.edges()) {
    hq(u, v) = -lambda;
    hq(v, u) = -lambda;
  }
  return hq;
}

Matrix assemble_hp(const Graph& g, const HpSpec& spec) {
  const int n = g.n_vertices();
  if (spec.kind == HpSpec::Kind::scalar) {
    return Matrix::Identity(n, n) * (0.5 / spec.m);
  }
  Matrix hp = Matrix::Identity(n, n) * spec.c;
  for (const auto& [u, v] : g.edges()) {
    hp(u, v) += spec.delta;
    hp(v, u) += spec.delta;
  }
  SymmetricEigen e = sym_eig(hp);
  if (!(e.values.minCoeff() > 0.0)) {
    throw not_positive_definite("band hp is not positive definite (c=" +
                                    std::to_string(spec.c) + ", delta=" +
                                    std::to_string(spec.delta) + ")",
                                e.values.minCoeff());
  }
  return hp;
}

double EffectiveHamiltonian::gap() const { return 2.0 * std::sqrt(min_eig); }

namespace {

// Exact multiple of the identity, detected entry-wise.
bool is_scalar_matrix(const Matrix& a, double& scale) {
  scale = a(0, 0);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i == j ? a(i, j) != scale : a(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

EffectiveHamiltonian effective_h(const Matrix& hq, const Matrix& hp, double eps_rel) {
  if (hq.rows() != hq.cols() || hp.rows() != hp.cols() || hq.rows() != hp.rows())
    throw std::invalid_argument("hq and hp must be square matrices of equal size");

  Matrix h;
  double scale = 0.0;
  if (is_scalar_matrix(hp, scale)) {
    if (!(scale > 0)) throw not_positive_definite("scalar hp is not positive", scale);
    h = hq * scale;
  } else {
    SymmetricEigen ep = sym_eig(hp);
    if (!(ep.values.minCoeff() > 0.0))
      throw not_positive_definite("hp is not positive definite", ep.values.minCoeff());
    Matrix hp_half = eigen_apply(ep, [](double x) { return std::sqrt(x); });
    h = symmetrized(hp_half * symmetrized(hq) * hp_half);
  }

  EffectiveHamiltonian out;
  out.h = symmetrized(h);
  SymmetricEigen e = sym_eig(out.h);
  out.eigenvalues = e.values;
  out.eigenvectors = e.vectors;
  out.min_eig = e.values.minCoeff();
  out.max_eig = e.values.maxCoeff();

  double norm = spectral_norm(e);
  if (out.min_eig <= eps_rel * norm) {
    throw not_positive_definite("effective Hamiltonian is numerically singular (min eig " +
                                    std::to_string(out.min_eig) + ")",
                                out.min_eig);
  }
  out.condition_number = out.max_eig / out.min_eig;

  if (reconstruction_residual(e, out.h) > 1e-10)
    throw numerical_error("eigendecomposition residual exceeds 1e-10 of ||h||");
  if (orthogonality_residual(e) > 1e-10)
    throw numerical_error("eigenvector orthogonality residual exceeds 1e-10");
  return out;
}

OscillatorSystem make_system(std::shared_ptr<const Graph> graph, Region region0,
                             const DisorderSample& sample, const ModelParams& params,
                             const HpSpec& hp_spec, std::optional<double> beta) {
  if (!graph) throw std::invalid_argument("make_system needs a graph");
  if (region0.parent_size != graph->n_vertices())
    throw std::invalid_argument("region does not belong to this graph");
  OscillatorSystem sys;
  sys.hq = assemble_hq(*graph, sample.k, params.lambda, params.g);
  sys.hp = assemble_hp(*graph, hp_spec);
  sys.graph = std::move(graph);
  sys.region0 = std::move(region0);
  sys.params = params;
  sys.beta = beta;
  return sys;
}

void validate_norm_bounds(const OscillatorSystem& sys, double c) {
  SymmetricEigen ep = sym_eig(sys.hp);
  double hp_min = ep.values.minCoeff();
  if (!(hp_min > 0.0))
    throw not_positive_definite("hp is not positive definite", hp_min);
  double hp_norm = spectral_norm(ep);
  double hp_inv_norm = 1.0 / hp_min;
  double hq_norm = spectral_norm(sym_eig(sys.hq));
  auto check = [c](const char* name, double value) {
    if (!(std::isfinite(value)) || value > c) {
      throw numerical_error(std::string("norm bound violated: ||") + name + "|| = " +
                            std::to_string(value) + " exceeds the configured bound " +
                            std::to_string(c));
    }
  };
  check("hp", hp_norm);
  check("hp^-1", hp_inv_norm);
  check("hq", hq_norm);
}

}  // namespace oscneg
