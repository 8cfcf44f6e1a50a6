#pragma once

#include <optional>

#include "oscneg/graph.hpp"
#include "oscneg/linalg.hpp"
#include "oscneg/oscillator.hpp"
#include "oscneg/spectra.hpp"

namespace oscneg {

enum class StateKind { ground, thermal };

/// Position/momentum blocks M1, M2 of the state covariance in the real
/// block basis. Ground blocks are mutual inverses; thermal blocks carry
/// an extra coth(beta h^{1/2}) factor.
struct CovariancePair {
  Matrix m1;
  Matrix m2;
  StateKind kind = StateKind::ground;
  double beta = 0.0;  // thermal only
};

/// Diagonal +-1 matrix implementing the partial transpose: -1 on the
/// transposed subregion, +1 elsewhere.
struct SignMatrix {
  Vector diag;
  static SignMatrix for_region(const Region& region0);
};

enum class SymplecticRoute { block_shortcut, general_jm };

struct SymplecticSpectrum {
  Vector lambdas;  // ascending, all > 0
  SymplecticRoute route = SymplecticRoute::block_shortcut;
};

/// Covariance blocks of the ground (sys.beta unset) or thermal state.
CovariancePair covariance_blocks(const OscillatorSystem& sys,
                                 const EffectiveHamiltonian& h);

/// Core matrix of the partially transposed functional:
/// L = M1^{1/2} P M2 P M1^{1/2}. Invariant under P -> -P.
Matrix transposed_core(const CovariancePair& cov, const SignMatrix& p);

/// Symplectic eigenvalues of the block-diagonal covariance (M1, M2).
/// block_shortcut: square roots of the eigenvalues of M1^{1/2} M2 M1^{1/2};
/// general_jm: positive eigenvalues of i M^{1/2} J M^{1/2} on the doubled
/// space. The two routes agree to 1e-9 relative on well-conditioned input.
SymplecticSpectrum symplectic_spectrum(const Matrix& m1, const Matrix& m2,
                                       SymplecticRoute route);

/// Spectrum of a precomputed core L (block-shortcut route).
SymplecticSpectrum core_spectrum(const Matrix& core);

/// Clip tolerance at lambda = 1: eigenvalues in [1 - tau, 1] contribute 0.
constexpr double kNegativityClipTol = 1e-10;

/// N = sum over lambda_j < 1 - tau of log(1/lambda_j). Natural log.
double log_negativity(const SymplecticSpectrum& spectrum,
                      double clip_tol = kNegativityClipTol);

/// Von Neumann entropy of the ground state restricted to region0, from
/// the reduced symplectic eigenvalues nu_j of the region submatrices.
/// Throws numerical_error if some nu_j < 1 - 1e-8.
double entanglement_entropy(const CovariancePair& cov, const Region& region0);

/// Upper bound 2 ||M1^{-1}|| sum_{x in region0, y outside} |<dx, M2^{-1} dy>|
/// with the ground/thermal weights of the bound.
double negativity_upper_bound(const OscillatorSystem& sys,
                              const EffectiveHamiltonian& h);

struct SampleMeta {
  std::int64_t sample_index = 0;
  double condition_number = 0.0;
  double min_eig = 0.0;
  bool rejected = false;
};

struct NegativityReport {
  double negativity = 0.0;
  int lambdas_below_one = 0;
  std::optional<double> entropy;  // ground states only
  double upper_bound_lemma41 = 0.0;
  SampleMeta sample_meta;
};

/// Full per-sample pipeline: covariance blocks, transposed core,
/// negativity, entropy (ground), and the deterministic upper bound.
NegativityReport evaluate_sample(const OscillatorSystem& sys,
                                 const EffectiveHamiltonian& h);

}  // namespace oscneg
