#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "oscneg/disorder.hpp"
#include "oscneg/graph.hpp"
#include "oscneg/linalg.hpp"

namespace oscneg {

struct ModelParams {
  double m = 1.0;       // oscillator mass
  double lambda = 1.0;  // edge coupling
  double g = 1.0;       // disorder strength
};

/// Momentum-part matrix: either (1/2m) * identity or the diagonally
/// dominant band form c*I + delta*T with T the hopping (adjacency) matrix.
struct HpSpec {
  enum class Kind { scalar, band };
  Kind kind = Kind::scalar;
  double m = 1.0;      // scalar case
  double c = 1.0;      // band case
  double delta = 0.0;  // band case

  static HpSpec scalar(double m);
  static HpSpec band(double c, double delta);
};

/// Position-part matrix on the graph: lambda * graph Laplacian plus the
/// random diagonal (g/2) k_x.
Matrix assemble_hq(const Graph& g, const std::vector<double>& k, double lambda,
                   double g_disorder);

/// Momentum-part matrix; the band form is rejected (not_positive_definite)
/// if its eigendecomposition shows a non-positive eigenvalue.
Matrix assemble_hp(const Graph& g, const HpSpec& spec);

/// h = hp^{1/2} hq hp^{1/2} together with its eigendecomposition.
struct EffectiveHamiltonian {
  Matrix h;
  Vector eigenvalues;   // ascending, all > 0
  Matrix eigenvectors;  // columns
  double min_eig = 0.0;
  double max_eig = 0.0;
  double condition_number = 0.0;

  /// Ground-state gap of the many-body Hamiltonian: 2 * min sqrt(eig).
  double gap() const;
};

/// Builds the effective Hamiltonian. Scalar hp (an exact multiple of the
/// identity) is applied as an exact scaling of hq. Throws
/// not_positive_definite when min eig <= eps_rel * ||h||; such samples are
/// meant to be counted as rejected, never patched.
EffectiveHamiltonian effective_h(const Matrix& hq, const Matrix& hp,
                                 double eps_rel = 1e-13);

struct OscillatorSystem {
  std::shared_ptr<const Graph> graph;
  Region region0;
  Matrix hq;
  Matrix hp;
  ModelParams params;
  std::optional<double> beta;  // thermal state when set, ground state otherwise
};

/// Assembles an oscillator system from its ingredients.
OscillatorSystem make_system(std::shared_ptr<const Graph> graph, Region region0,
                             const DisorderSample& sample, const ModelParams& params,
                             const HpSpec& hp_spec,
                             std::optional<double> beta = std::nullopt);

/// Uniform norm bound check: ||hp||, ||hp^{-1}||, ||hq|| must all be
/// finite and <= c. Violation is an error, not a warning.
void validate_norm_bounds(const OscillatorSystem& sys, double c);

}  // namespace oscneg
