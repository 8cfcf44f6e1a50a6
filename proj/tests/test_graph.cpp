#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oscneg/graph.hpp"

using namespace oscneg;

namespace {

// Independent distance oracle: repeated min-plus products of the
// adjacency structure, usable for graphs up to ~30 vertices.
std::vector<int> min_plus_distances(const Graph& g) {
  const int n = g.n_vertices();
  const int inf = 1 << 20;
  std::vector<int> d(n * n, inf);
  for (int i = 0; i < n; ++i) d[i * n + i] = 0;
  for (const auto& [u, v] : g.edges()) d[u * n + v] = d[v * n + u] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> next(d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          int via = d[i * n + k] + d[k * n + j];
          if (via < next[i * n + j]) {
            next[i * n + j] = via;
            changed = true;
          }
        }
    d.swap(next);
  }
  return d;
}

}  // namespace

TEST_CASE("path graph counts and distances") {
  Graph g = Graph::path(3);
  CHECK(g.n_vertices() == 3);
  CHECK(g.edges().size() == 2);
  CHECK(g.dist(0, 2) == 2);
  CHECK(g.max_degree() == 2);
}

TEST_CASE("box graph counts") {
  Graph g = Graph::box(2, 3);
  CHECK(g.n_vertices() == 9);
  CHECK(g.edges().size() == 12);
  CHECK(g.max_degree() == 4);
}

TEST_CASE("bethe tree counts") {
  Graph g = Graph::bethe(2, 2);
  CHECK(g.n_vertices() == 10);  // 1 + 3 + 6
  CHECK(g.degree(0) == 3);
  Graph plain = Graph::bethe(2, 2, false);
  CHECK(plain.n_vertices() == 7);  // 1 + 2 + 4
  CHECK(plain.degree(0) == 2);
}

TEST_CASE("graph construction rejects bad input") {
  CHECK_THROWS(Graph::custom(4, {{0, 1}, {2, 3}}));           // disconnected
  CHECK_THROWS(Graph::custom(2, {{0, 0}}));                   // self-loop
  CHECK_THROWS(Graph::custom(2, {{0, 1}, {1, 0}}));           // duplicate
  CHECK_THROWS(Graph::custom(2, {{0, 5}}));                   // out of range
  CHECK_THROWS(Graph::box(3, 40));                            // cap exceeded
}

TEST_CASE("edge list file parsing") {
  namespace fs = std::filesystem;
  fs::path file = fs::temp_directory_path() / "oscneg_edges_test.txt";
  {
    std::ofstream out(file);
    out << "# a 4-cycle\n0 1\n1 2\n2 3  # closing\n3 0\n\n";
  }
  Graph g = Graph::from_edge_list_file(file);
  CHECK(g.n_vertices() == 4);
  CHECK(g.edges().size() == 4);
  CHECK(g.dist(0, 2) == 2);
  {
    std::ofstream out(file);
    out << "0 1\n2 3\n";
  }
  CHECK_THROWS(Graph::from_edge_list_file(file));
  fs::remove(file);
}

TEST_CASE("distance invariants and BFS vs min-plus oracle") {
  for (const Graph& g : {Graph::path(13), Graph::box(2, 5), Graph::bethe(2, 3),
                         Graph::custom(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}})}) {
    const int n = g.n_vertices();
    REQUIRE(n <= 30);
    std::vector<int> oracle = min_plus_distances(g);
    for (int x = 0; x < n; ++x) {
      CHECK(g.dist(x, x) == 0);
      for (int y = 0; y < n; ++y) {
        CHECK(g.dist(x, y) == oracle[x * n + y]);
        CHECK(g.dist(x, y) == g.dist(y, x));
        for (int z = 0; z < n; ++z) CHECK(g.dist(x, y) <= g.dist(x, z) + g.dist(z, y));
      }
    }
  }
}

TEST_CASE("boundary of an interval and of the whole volume") {
  Graph g = Graph::path(10);
  Region inner({3, 4, 5}, 10);
  Region b = boundary(g, inner);
  CHECK(b.members == std::vector<int>{3, 5});
  CHECK(boundary(g, Region::all(10)).empty());
}

TEST_CASE("boundary of the center block of a box") {
  Graph g = Graph::box(2, 5);
  std::vector<int> members;
  for (int v = 0; v < g.n_vertices(); ++v) {
    int row = v / 5, col = v % 5;
    if (row >= 1 && row <= 3 && col >= 1 && col <= 3) members.push_back(v);
  }
  Region inner(members, g.n_vertices());
  CHECK(inner.size() == 9);
  CHECK(boundary(g, inner).size() == 8);  // ring of the 3x3 block
}

TEST_CASE("c_mu values") {
  Graph single = Graph::custom(1, {});
  CHECK(c_mu(single, 0.7) == doctest::Approx(1.0));
  Graph g = Graph::path(3);
  CHECK(c_mu(g, 1.0) == doctest::Approx(1.0 + 2.0 * std::exp(-1.0)).epsilon(1e-12));
  // geometric series majorant on a long chain
  for (double mu : {0.5, 1.0, 2.0}) {
    Graph chain = Graph::path(2 * 8 + 1);
    double bound = (1.0 + std::exp(-mu)) / (1.0 - std::exp(-mu));
    CHECK(c_mu(chain, mu) <= bound + 1e-12);
  }
}

TEST_CASE("boundary_sum values and direct summation oracle") {
  Graph two = Graph::path(2);
  CHECK(boundary_sum(two, Region({0}, 2), 1.0) == doctest::Approx(std::exp(-1.0)));

  Graph g = Graph::path(10);
  Region inner({0, 1, 2, 3, 4}, 10);
  double direct = 0.0;
  for (int x = 0; x <= 4; ++x)
    for (int y = 5; y <= 9; ++y) direct += std::exp(-1.0 * std::abs(x - y));
  CHECK(boundary_sum(g, inner, 1.0) == doctest::Approx(direct).epsilon(1e-14));
  double c = c_mu(g, 1.0);
  CHECK(boundary_sum(g, inner, 1.0) <= c * c * boundary(g, inner).size());

  CHECK(boundary_sum(g, Region::all(10), 1.0) == 0.0);
}

TEST_CASE("boundary lemma holds for every interval and mu") {
  for (double mu : {0.5, 1.0, 2.0}) {
    for (const Graph& g : {Graph::path(12), Graph::box(2, 4), Graph::bethe(2, 3)}) {
      double c = c_mu(g, mu);
      const int n = g.n_vertices();
      // sweep a family of hop balls as regions
      for (int center = 0; center < n; ++center) {
        for (int radius = 0; radius < 3; ++radius) {
          std::vector<int> members;
          for (int v = 0; v < n; ++v)
            if (g.dist(center, v) <= radius) members.push_back(v);
          Region inner(members, n);
          CHECK(boundary_sum(g, inner, mu) <= c * c * boundary(g, inner).size());
        }
      }
    }
  }
}

TEST_CASE("degree and c_mu relations") {
  for (double mu : {0.5, 1.0, 2.0}) {
    for (const Graph& g : {Graph::path(9), Graph::box(2, 3), Graph::bethe(3, 2)}) {
      CHECK(g.max_degree() <= c_mu(g, mu) * std::exp(mu) + 1e-12);
      CHECK(c_mu(g, mu) <= g.n_vertices() + 1e-12);
    }
  }
}
