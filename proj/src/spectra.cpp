#include "oscneg/spectra.hpp"

#include <cmath>
#include <stdexcept>

namespace oscneg {

namespace {

SpectralFunction with_beta(SpectralTag tag, double beta) {
  if (!(beta > 0)) throw std::invalid_argument("thermal spectral functions require beta > 0");
  return {tag, beta};
}

constexpr double kCothSeriesCutoff = 1e-4;

}  // namespace

SpectralFunction SpectralFunction::sqrt_coth(double beta) {
  return with_beta(SpectralTag::sqrt_coth, beta);
}
SpectralFunction SpectralFunction::inv_sqrt_coth(double beta) {
  return with_beta(SpectralTag::inv_sqrt_coth, beta);
}
SpectralFunction SpectralFunction::sqrt_tanh(double beta) {
  return with_beta(SpectralTag::sqrt_tanh, beta);
}
SpectralFunction SpectralFunction::inv_sqrt_tanh(double beta) {
  return with_beta(SpectralTag::inv_sqrt_tanh, beta);
}

double coth_stable(double x) {
  if (!(x > 0)) throw std::invalid_argument("coth_stable requires x > 0");
  if (x < kCothSeriesCutoff) return 1.0 / x + x / 3.0 - x * x * x / 45.0;
  return 1.0 + 2.0 / std::expm1(2.0 * x);
}

double eval_spectral(const SpectralFunction& f, double x) {
  if (!(x > 0)) {
    throw not_positive_definite("spectral function applied to a non-positive eigenvalue", x);
  }
  double r = std::sqrt(x);
  switch (f.tag) {
    case SpectralTag::inv_sqrt: return 1.0 / r;
    case SpectralTag::sqrt: return r;
    case SpectralTag::sqrt_coth: return r * coth_stable(f.beta * r);
    case SpectralTag::inv_sqrt_coth: return coth_stable(f.beta * r) / r;
    case SpectralTag::sqrt_tanh: return r * std::tanh(f.beta * r);
    case SpectralTag::inv_sqrt_tanh: return std::tanh(f.beta * r) / r;
    case SpectralTag::log: return std::log(x);
  }
  throw std::logic_error("unknown spectral tag");
}

Matrix apply(const SpectralFunction& f, const EffectiveHamiltonian& h) {
  Vector fd(h.eigenvalues.size());
  for (Eigen::Index i = 0; i < h.eigenvalues.size(); ++i)
    fd[i] = eval_spectral(f, h.eigenvalues[i]);
  return symmetrized(h.eigenvectors * fd.asDiagonal() * h.eigenvectors.transpose());
}

}  // namespace oscneg
