#include "oscneg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oscneg {

namespace {
constexpr int kUnreached = -1;
}

std::string to_string(GraphFamily f) {
  switch (f) {
    case GraphFamily::path: return "path";
    case GraphFamily::box: return "box";
    case GraphFamily::bethe: return "bethe";
    case GraphFamily::custom: return "custom";
  }
  return "?";
}

void Graph::finalize(GraphFamily family, int cap) {
  family_ = family;
  if (n_ <= 0) throw std::invalid_argument("graph must have at least one vertex");
  if (n_ > cap) {
    throw std::invalid_argument("graph has " + std::to_string(n_) +
                                " vertices, exceeding the cap of " + std::to_string(cap));
  }

  adjacency_.assign(n_, {});
  std::set<std::pair<int, int>> seen;
  for (auto& [u, v] : edges_) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_)
      throw std::invalid_argument("edge endpoint out of range");
    if (u == v) throw std::invalid_argument("self-loops are not allowed");
    auto key = std::minmax(u, v);
    if (!seen.insert(key).second) throw std::invalid_argument("duplicate edge");
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());

  max_degree_ = 0;
  for (int x = 0; x < n_; ++x) max_degree_ = std::max(max_degree_, degree(x));

  // BFS from every vertex; also detects disconnected inputs.
  dist_.assign(static_cast<std::size_t>(n_) * n_, kUnreached);
  std::deque<int> queue;
  for (int src = 0; src < n_; ++src) {
    int* row = dist_.data() + static_cast<std::size_t>(src) * n_;
    row[src] = 0;
    queue.clear();
    queue.push_back(src);
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      for (int y : adjacency_[x]) {
        if (row[y] == kUnreached) {
          row[y] = row[x] + 1;
          queue.push_back(y);
        }
      }
    }
    for (int y = 0; y < n_; ++y) {
      if (row[y] == kUnreached) throw std::invalid_argument("graph is not connected");
    }
  }
}

Graph Graph::path(int sites) {
  if (sites < 1) throw std::invalid_argument("path needs at least one site");
  Graph g;
  g.n_ = sites;
  for (int i = 0; i + 1 < sites; ++i) g.edges_.emplace_back(i, i + 1);
  g.finalize(GraphFamily::path, default_vertex_cap);
  return g;
}

Graph Graph::box(int dim, int side) {
  if (dim < 1 || side < 1) throw std::invalid_argument("box needs dim >= 1 and side >= 1");
  double count = std::pow(static_cast<double>(side), dim);
  if (count > default_vertex_cap)
    throw std::invalid_argument("box size exceeds the vertex cap");
  int n = 1;
  for (int d = 0; d < dim; ++d) n *= side;

  Graph g;
  g.n_ = n;
  g.box_dim_ = dim;
  g.box_side_ = side;
  g.coords_.assign(n, std::vector<int>(dim, 0));
  for (int idx = 0; idx < n; ++idx) {
    int rest = idx;
    for (int d = dim - 1; d >= 0; --d) {
      g.coords_[idx][d] = rest % side;
      rest /= side;
    }
  }
  // Row-major indexing: stepping the last coordinate moves by 1.
  int stride = 1;
  std::vector<int> strides(dim, 1);
  for (int d = dim - 1; d >= 0; --d) {
    strides[d] = stride;
    stride *= side;
  }
  for (int idx = 0; idx < n; ++idx) {
    for (int d = 0; d < dim; ++d) {
      if (g.coords_[idx][d] + 1 < side) g.edges_.emplace_back(idx, idx + strides[d]);
    }
  }
  g.finalize(GraphFamily::box, default_vertex_cap);
  return g;
}

Graph Graph::bethe(int branching, int depth, bool regular_root) {
  if (branching < 1 || depth < 0)
    throw std::invalid_argument("bethe needs branching >= 1 and depth >= 0");
  Graph g;
  g.n_ = 1;
  std::vector<int> frontier = {0};
  for (int level = 1; level <= depth; ++level) {
    std::vector<int> next;
    for (int parent : frontier) {
      int children = (parent == 0 && regular_root) ? branching + 1 : branching;
      for (int c = 0; c < children; ++c) {
        int child = g.n_++;
        if (g.n_ > default_vertex_cap)
          throw std::invalid_argument("bethe tree exceeds the vertex cap");
        g.edges_.emplace_back(parent, child);
        next.push_back(child);
      }
    }
    frontier = std::move(next);
  }
  g.finalize(GraphFamily::bethe, default_vertex_cap);
  return g;
}

Graph Graph::custom(int n, std::vector<std::pair<int, int>> edges) {
  Graph g;
  g.n_ = n;
  g.edges_ = std::move(edges);
  g.finalize(GraphFamily::custom, default_vertex_cap);
  return g;
}

Graph Graph::from_edge_list_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open edge list file: " + file.string());
  std::vector<std::pair<int, int>> edges;
  int max_index = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long u, v;
    if (!(ls >> u)) continue;  // blank or comment-only line
    if (!(ls >> v)) {
      throw std::invalid_argument(file.string() + ":" + std::to_string(lineno) +
                                  ": expected two vertex indices");
    }
    long long trailing;
    if (ls >> trailing) {
      throw std::invalid_argument(file.string() + ":" + std::to_string(lineno) +
                                  ": trailing tokens after edge");
    }
    if (u < 0 || v < 0 || u > std::numeric_limits<int>::max() ||
        v > std::numeric_limits<int>::max()) {
      throw std::invalid_argument(file.string() + ":" + std::to_string(lineno) +
                                  ": vertex index out of range");
    }
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    max_index = std::max<int>({max_index, static_cast<int>(u), static_cast<int>(v)});
  }
  if (edges.empty()) throw std::invalid_argument("edge list file has no edges: " + file.string());
  return custom(max_index + 1, std::move(edges));
}

bool Graph::adjacent(int x, int y) const {
  const auto& nbrs = adjacency_[x];
  return std::binary_search(nbrs.begin(), nbrs.end(), y);
}

Region::Region(std::vector<int> members_in, int parent_size_in)
    : members(std::move(members_in)), parent_size(parent_size_in) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (!members.empty() && (members.front() < 0 || members.back() >= parent_size))
    throw std::invalid_argument("region member out of range");
}

Region Region::all(int n) {
  std::vector<int> m(n);
  for (int i = 0; i < n; ++i) m[i] = i;
  return Region(std::move(m), n);
}

bool Region::contains(int x) const {
  return std::binary_search(members.begin(), members.end(), x);
}

Region complement(const Region& inner) {
  std::vector<int> out;
  out.reserve(inner.parent_size - inner.size());
  for (int x = 0; x < inner.parent_size; ++x) {
    if (!inner.contains(x)) out.push_back(x);
  }
  return Region(std::move(out), inner.parent_size);
}

Region boundary(const Graph& g, const Region& inner) {
  if (inner.parent_size != g.n_vertices())
    throw std::invalid_argument("region does not belong to this graph");
  std::vector<int> members;
  for (int x : inner.members) {
    for (int y : g.neighbors(x)) {
      if (!inner.contains(y)) {
        members.push_back(x);
        break;
      }
    }
  }
  return Region(std::move(members), inner.parent_size);
}

double c_mu(const Graph& g, double mu) {
  if (!(mu > 0)) throw std::invalid_argument("c_mu requires mu > 0");
  const int n = g.n_vertices();
  double sup = 0.0;
  for (int x = 0; x < n; ++x) {
    double sum = 0.0;
    for (int y = 0; y < n; ++y) sum += std::exp(-mu * g.dist(x, y));
    sup = std::max(sup, sum);
  }
  return sup;
}

double boundary_sum(const Graph& g, const Region& inner, double mu) {
  if (!(mu > 0)) throw std::invalid_argument("boundary_sum requires mu > 0");
  if (inner.parent_size != g.n_vertices())
    throw std::invalid_argument("region does not belong to this graph");
  const int n = g.n_vertices();
  std::vector<char> in(n, 0);
  for (int x : inner.members) in[x] = 1;
  double sum = 0.0;
  for (int x : inner.members) {
    for (int y = 0; y < n; ++y) {
      if (!in[y]) sum += std::exp(-mu * g.dist(x, y));
    }
  }
  return sum;
}

}  // namespace oscneg
