#pragma once

#include "oscneg/linalg.hpp"
#include "oscneg/oscillator.hpp"

namespace oscneg {

/// Scalar functions applied to the (positive) spectrum of the effective
/// Hamiltonian. The coth/tanh variants act on sqrt of the argument:
/// e.g. sqrt_coth maps x to sqrt(x) * coth(beta * sqrt(x)).
enum class SpectralTag {
  inv_sqrt,
  sqrt,
  sqrt_coth,
  inv_sqrt_coth,
  sqrt_tanh,
  inv_sqrt_tanh,
  log
};

struct SpectralFunction {
  SpectralTag tag;
  double beta = 0.0;  // required by the coth/tanh variants

  static SpectralFunction inv_sqrt() { return {SpectralTag::inv_sqrt}; }
  static SpectralFunction sqrt() { return {SpectralTag::sqrt}; }
  static SpectralFunction sqrt_coth(double beta);
  static SpectralFunction inv_sqrt_coth(double beta);
  static SpectralFunction sqrt_tanh(double beta);
  static SpectralFunction inv_sqrt_tanh(double beta);
  static SpectralFunction log() { return {SpectralTag::log}; }
};

/// coth(x) for x > 0, using 1 + 2/(e^{2x}-1) above x0 = 1e-4 and the
/// series 1/x + x/3 - x^3/45 below it.
double coth_stable(double x);

/// Scalar rule of the spectral function at x > 0.
double eval_spectral(const SpectralFunction& f, double x);

/// V f(D) V^T through the eigendecomposition carried by H.
Matrix apply(const SpectralFunction& f, const EffectiveHamiltonian& h);

}  // namespace oscneg
