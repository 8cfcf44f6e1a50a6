#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oscneg/disorder.hpp"
#include "oscneg/oscillator.hpp"

using namespace oscneg;

TEST_CASE("two-site hq matches the hand-expanded quadratic form") {
  Graph g = Graph::path(2);
  double lambda = 0.7, gd = 1.3, k1 = 0.4, k2 = 0.9;
  Matrix hq = assemble_hq(g, {k1, k2}, lambda, gd);
  CHECK(hq(0, 0) == doctest::Approx(lambda + 0.5 * gd * k1));
  CHECK(hq(1, 1) == doctest::Approx(lambda + 0.5 * gd * k2));
  CHECK(hq(0, 1) == doctest::Approx(-lambda));
  CHECK(hq(1, 0) == doctest::Approx(-lambda));
}

TEST_CASE("lambda = 0 decouples the oscillators") {
  Graph g = Graph::path(4);
  Matrix hq = assemble_hq(g, {1, 2, 3, 4}, 0.0, 2.0);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j)
        CHECK(hq(i, j) == doctest::Approx(i + 1.0));
      else
        CHECK(hq(i, j) == 0.0);
    }
  }
}

TEST_CASE("quadratic form identity on random vectors") {
  Graph g = Graph::box(2, 3);
  DisorderSpec spec = DisorderSpec::uniform(1.0, 11);
  DisorderSample k = draw(spec, 0, g.n_vertices());
  double lambda = 1.2, gd = 0.8;
  Matrix hq = assemble_hq(g, k.k, lambda, gd);
  for (int trial = 0; trial < 100; ++trial) {
    Vector f(g.n_vertices());
    for (int i = 0; i < g.n_vertices(); ++i)
      f[i] = 2.0 * uniform01(123, trial, i, 0) - 1.0;
    double direct = f.dot(hq * f);
    double form = 0.0;
    for (const auto& [x, y] : g.edges()) form += lambda * (f[y] - f[x]) * (f[y] - f[x]);
    for (int x = 0; x < g.n_vertices(); ++x) form += 0.5 * gd * k.k[x] * f[x] * f[x];
    CHECK(std::abs(direct - form) <= 1e-12 * std::max(1.0, std::abs(form)));
  }
}

TEST_CASE("operator norm bound on hq") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    Graph g = Graph::bethe(2, 3);
    double k_max = 2.0, lambda = 0.9, gd = 1.5;
    DisorderSample k = draw(DisorderSpec::uniform(k_max, seed), 0, g.n_vertices());
    Matrix hq = assemble_hq(g, k.k, lambda, gd);
    double norm = spectral_norm(sym_eig(hq));
    CHECK(norm <= 2.0 * lambda * g.max_degree() + 0.5 * gd * k_max + 1e-12);
  }
}

TEST_CASE("scalar hp") {
  Graph g = Graph::path(3);
  Matrix hp = assemble_hp(g, HpSpec::scalar(1.0));
  CHECK((hp - 0.5 * Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("band hp spectrum on a path") {
  Graph g = Graph::path(3);
  Matrix hp = assemble_hp(g, HpSpec::band(1.0, 0.0));
  CHECK((hp - Matrix::Identity(3, 3)).norm() == 0.0);

  Matrix banded = assemble_hp(g, HpSpec::band(1.0, 0.4));
  double min_eig = sym_eig(banded).values.minCoeff();
  CHECK(min_eig == doctest::Approx(1.0 - 0.4 * std::sqrt(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS(assemble_hp(g, HpSpec::band(1.0, 0.8)), not_positive_definite);
}

TEST_CASE("effective Hamiltonian, scalar scaling") {
  Matrix hq(2, 2);
  hq << 1, 0, 0, 4;
  Matrix hp = 0.5 * Matrix::Identity(2, 2);
  EffectiveHamiltonian h = effective_h(hq, hp);
  CHECK(h.h(0, 0) == doctest::Approx(0.5));
  CHECK(h.h(1, 1) == doctest::Approx(2.0));
  CHECK(h.min_eig == doctest::Approx(0.5));
  CHECK(h.max_eig == doctest::Approx(2.0));
}

TEST_CASE("single site closed form") {
  Graph g = Graph::path(1);
  DisorderSample k;
  k.k = {1.0};
  OscillatorSystem sys = make_system(std::make_shared<Graph>(g), Region({}, 1), k,
                                     ModelParams{1.0, 0.0, 1.0}, HpSpec::scalar(1.0));
  EffectiveHamiltonian h = effective_h(sys.hq, sys.hp);
  CHECK(h.h(0, 0) == doctest::Approx(0.25));  // g k / (4 m)
  CHECK(h.gap() == doctest::Approx(1.0));     // 2 sqrt(1/4)
}

TEST_CASE("eigenvalues of h match eigenvalues of hp*hq (similarity)") {
  Graph g = Graph::path(5);
  DisorderSample k = draw(DisorderSpec::uniform(1.0, 17), 0, 5);
  Matrix hq = assemble_hq(g, k.k, 1.0, 1.0);
  Matrix hp = assemble_hp(g, HpSpec::band(1.0, 0.3));
  EffectiveHamiltonian h = effective_h(hq, hp);

  Eigen::EigenSolver<Matrix> general(hp * hq);
  Vector general_eigs = general.eigenvalues().real();
  std::sort(general_eigs.data(), general_eigs.data() + general_eigs.size());
  for (int i = 0; i < 5; ++i)
    CHECK(std::abs(h.eigenvalues[i] - general_eigs[i]) <=
          1e-9 * std::max(1.0, h.max_eig));
}

TEST_CASE("spectrum of h sits inside (0, ||hp|| ||hq||]") {
  Graph g = Graph::path(9);
  DisorderSample k = draw(DisorderSpec::uniform(1.0, 23), 0, 9);
  Matrix hq = assemble_hq(g, k.k, 1.0, 1.0);
  Matrix hp = assemble_hp(g, HpSpec::scalar(2.0));
  EffectiveHamiltonian h = effective_h(hq, hp);
  double hp_norm = spectral_norm(sym_eig(hp));
  double hq_norm = spectral_norm(sym_eig(hq));
  CHECK(h.min_eig > 0.0);
  CHECK(h.max_eig <= hp_norm * hq_norm + 1e-12);
}

TEST_CASE("gap at lambda = 0 is exact") {
  Graph g = Graph::path(6);
  DisorderSample k = draw(DisorderSpec::uniform(1.0, 31), 0, 6);
  double gd = 1.7, m = 1.3;
  Matrix hq = assemble_hq(g, k.k, 0.0, gd);
  EffectiveHamiltonian h = effective_h(hq, assemble_hp(g, HpSpec::scalar(m)));
  double k_min = *std::min_element(k.k.begin(), k.k.end());
  // closed form g k_min / (4 m), associated the way the assembly rounds it
  // so the equality is exact: the eigensolver must add no fuzz on an
  // already-diagonal matrix
  double closed_form = (0.5 * gd * k_min) * (0.5 / m);
  CHECK(h.gap() == 2.0 * std::sqrt(closed_form));
  CHECK(h.gap() == doctest::Approx(2.0 * std::sqrt(gd * k_min / (4.0 * m))).epsilon(1e-15));
}

TEST_CASE("numerically singular samples are rejected, not fixed") {
  Matrix hq(2, 2);
  hq << 1.0, 1.0, 1.0, 1.0 + 1e-16;  // essentially rank one
  Matrix hp = 0.5 * Matrix::Identity(2, 2);
  try {
    effective_h(hq, hp);
    FAIL("expected not_positive_definite");
  } catch (const not_positive_definite& e) {
    CHECK(e.min_eig() < 1e-13);
  }
}

TEST_CASE("norm bound validation is an error, not a warning") {
  Graph g = Graph::path(3);
  DisorderSample k;
  k.k = {1.0, 1.0, 1.0};
  OscillatorSystem sys = make_system(std::make_shared<Graph>(g), Region({0}, 3), k,
                                     ModelParams{1.0, 1.0, 1.0}, HpSpec::scalar(1.0));
  validate_norm_bounds(sys, 100.0);
  CHECK_THROWS_AS(validate_norm_bounds(sys, 0.1), numerical_error);
}
