#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace corgii {

using Edge = std::pair<int, int>;

/// Undirected simple graph stored as a padded adjacency matrix.
///
/// Rows and columns at index >= n are padding and always zero. The padding
/// width is fixed per dataset so that every graph of a corpus shares one
/// matrix shape.
class Graph {
 public:
  Graph() = default;
  /// Builds a graph with `n` real nodes padded to `width` (width >= n).
  /// Edges are given on real nodes; duplicates are folded, self loops and
  /// out-of-range endpoints throw.
  Graph(int id, int n, int width, const std::vector<Edge>& edges);

  int id() const { return id_; }
  int n() const { return n_; }
  int width() const { return width_; }

  bool adjacent(int u, int v) const { return adj_[static_cast<size_t>(u) * width_ + v] != 0; }
  int degree(int u) const { return static_cast<int>(neighbors_[u].size()); }
  const std::vector<int>& neighbors(int u) const { return neighbors_[u]; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// Undirected edges with u < v, sorted lexicographically.
  const std::vector<Edge>& edges() const { return edges_; }

  /// Same graph with a different padding width.
  Graph repadded(int width) const;
  /// Same graph with node u renamed perm[u].
  Graph permuted(const std::vector<int>& perm) const;
  Graph with_id(int id) const;

  bool connected() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.id_ == b.id_ && a.n_ == b.n_ && a.width_ == b.width_ && a.adj_ == b.adj_;
  }

 private:
  int id_ = 0;
  int n_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<Edge> edges_;
};

}  // namespace corgii
