#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace oscneg {

enum class GraphFamily { path, box, bethe, custom };

std::string to_string(GraphFamily f);

/// Finite connected undirected graph with precomputed hop distances.
///
/// Vertices are 0-based. Distances are computed by breadth-first search
/// from every vertex at construction time; construction fails for
/// disconnected edge lists. Immutable after construction and safe to
/// share across threads.
class Graph {
 public:
  /// Line graph on `sites` vertices (indices 0..sites-1 left to right).
  static Graph path(int sites);

  /// Box [0,side)^dim in Z^dim with nearest-neighbor edges.
  /// Vertex indexing is row-major (last coordinate fastest).
  static Graph box(int dim, int side);

  /// Rooted tree approximation of the Bethe lattice with the given
  /// branching number. Every internal non-root vertex has `branching`
  /// children; with `regular_root` (the default) the root has
  /// branching+1 children so its degree matches the interior vertices.
  /// Vertices are indexed in level order, root = 0.
  static Graph bethe(int branching, int depth, bool regular_root = true);

  /// Arbitrary undirected edge list on n vertices. Rejects self-loops,
  /// duplicate edges, out-of-range indices and disconnected graphs.
  static Graph custom(int n, std::vector<std::pair<int, int>> edges);

  /// Edge-list text file: one "u v" pair per line, 0-based indices,
  /// '#' starts a comment. Vertex count is 1 + max index seen.
  static Graph from_edge_list_file(const std::filesystem::path& file);

  int n_vertices() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  GraphFamily family() const { return family_; }
  int max_degree() const { return max_degree_; }
  int degree(int x) const { return static_cast<int>(adjacency_[x].size()); }
  const std::vector<int>& neighbors(int x) const { return adjacency_[x]; }

  /// Hop distance between two vertices.
  int dist(int x, int y) const { return dist_[static_cast<std::size_t>(x) * n_ + y]; }

  bool adjacent(int x, int y) const;

  /// Geometric coordinates, available for box graphs (size dim per vertex).
  const std::vector<std::vector<int>>& coordinates() const { return coords_; }
  int box_dim() const { return box_dim_; }
  int box_side() const { return box_side_; }

  /// Configured cap on the number of vertices, enforced by the builders.
  static constexpr int default_vertex_cap = 20000;

 private:
  Graph() = default;
  void finalize(GraphFamily family, int cap);

  int n_ = 0;
  GraphFamily family_ = GraphFamily::custom;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> dist_;
  std::vector<std::vector<int>> coords_;
  int box_dim_ = 0;
  int box_side_ = 0;
  int max_degree_ = 0;
};

/// Subset of the vertices of an ambient graph of `parent_size` vertices.
/// Members are kept sorted and unique.
struct Region {
  std::vector<int> members;
  int parent_size = 0;

  Region() = default;
  Region(std::vector<int> members_in, int parent_size_in);

  static Region all(int n);
  bool contains(int x) const;
  bool empty() const { return members.empty(); }
  int size() const { return static_cast<int>(members.size()); }
};

/// Complement of `inner` within its ambient vertex set.
Region complement(const Region& inner);

/// Boundary of `inner` relative to the ambient graph: the vertices of
/// `inner` adjacent to at least one vertex outside it.
Region boundary(const Graph& g, const Region& inner);

/// sup_x sum_y exp(-mu d(x,y)), the geometric constant attached to mu.
double c_mu(const Graph& g, double mu);

/// sum over x in inner, y outside inner of exp(-mu d(x,y)).
/// Bounded by c_mu(g,mu)^2 * |boundary(g,inner)|.
double boundary_sum(const Graph& g, const Region& inner, double mu);

}  // namespace oscneg
