#include "corgii/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace corgii {

Graph::Graph(int id, int n, int width, const std::vector<Edge>& edges)
    : id_(id), n_(n), width_(width) {
  if (n < 1 || width < n) {
    throw std::invalid_argument("graph " + std::to_string(id) + ": need 1 <= n <= width, got n=" +
                                std::to_string(n) + " width=" + std::to_string(width));
  }
  adj_.assign(static_cast<size_t>(width) * width, 0);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw std::out_of_range("graph " + std::to_string(id) + ": dangling endpoint (" +
                              std::to_string(u) + ", " + std::to_string(v) + ") with n=" +
                              std::to_string(n));
    }
    if (u == v) {
      throw std::invalid_argument("graph " + std::to_string(id) + ": self loop at node " +
                                  std::to_string(u));
    }
    adj_[static_cast<size_t>(u) * width + v] = 1;
    adj_[static_cast<size_t>(v) * width + u] = 1;
  }
  neighbors_.assign(n, {});
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (adjacent(u, v)) {
        neighbors_[u].push_back(v);
        if (u < v) edges_.emplace_back(u, v);
      }
    }
  }
}

Graph Graph::repadded(int width) const { return Graph(id_, n_, width, edges_); }

Graph Graph::with_id(int id) const {
  Graph g = *this;
  g.id_ = id;
  return g;
}

Graph Graph::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_) {
    throw std::invalid_argument("permutation size does not match node count");
  }
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (auto [u, v] : edges_) out.emplace_back(perm[u], perm[v]);
  return Graph(id_, n_, width_, out);
}

bool Graph::connected() const {
  std::vector<char> seen(n_, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : neighbors_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n_;
}

}  // namespace corgii
