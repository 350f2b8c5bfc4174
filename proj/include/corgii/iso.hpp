#pragma once

#include <stdexcept>

#include "corgii/graph.hpp"

namespace corgii {

/// Raised when an exact containment check is requested on graphs larger than
/// the backtracking budget allows.
class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxIsoQueryNodes = 20;
inline constexpr int kMaxIsoCorpusNodes = 30;

/// Exact (non-induced) subgraph isomorphism: true iff an injective map from the
/// nodes of `query` into the nodes of `corpus` sends every query edge to a
/// corpus edge.
///
/// Degree-pruned backtracking. Query nodes are matched in a connectivity
/// order so that each new node is adjacent to an already placed one whenever
/// possible; corpus candidates are tried in ascending ID order.
bool is_subgraph_isomorphic(const Graph& query, const Graph& corpus);

}  // namespace corgii
