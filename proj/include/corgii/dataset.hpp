#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "corgii/graph.hpp"

namespace corgii {

struct QuerySplit {
  std::vector<int> train;
  std::vector<int> dev;
  std::vector<int> test;
};

/// Corpus graphs, query graphs, relevance labels and the query split.
///
/// Corpus and query IDs are independent namespaces. `relevant[qid]` holds the
/// sorted corpus IDs c with y_qc = 1; every other corpus graph is a negative.
struct Dataset {
  std::vector<Graph> corpus;
  std::vector<Graph> queries;
  std::map<int, std::vector<int>> relevant;
  QuerySplit split;

  /// Common padding width of every graph.
  int width() const;
  const Graph& corpus_graph(int id) const;
  const Graph& query_graph(int id) const;
  /// Positions of corpus graphs by ID (IDs are not required to be dense).
  int corpus_index(int id) const;
  int query_index(int id) const;
  bool is_relevant(int qid, int cid) const;
  const std::vector<int>& positives(int qid) const;
  /// Corpus IDs that are not relevant to `qid`, ascending.
  std::vector<int> negatives(int qid) const;

  /// Checks label and split invariants; throws std::invalid_argument.
  void validate() const;
  /// Rebuilds the ID lookup tables; call after editing corpus or queries.
  void reindex();

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.corpus == b.corpus && a.queries == b.queries && a.relevant == b.relevant &&
           a.split.train == b.split.train && a.split.dev == b.split.dev &&
           a.split.test == b.split.test;
  }

 private:
  std::map<int, int> corpus_pos_;
  std::map<int, int> query_pos_;
};

struct GenConfig {
  int corpus_size = 2000;
  int num_queries = 50;
  int corpus_min_nodes = 16;
  int corpus_max_nodes = 25;
  int query_min_nodes = 6;
  int query_max_nodes = 15;
  int max_degree = 4;
  int max_extra_edges = 3;
  double edge_delete_fraction = 0.2;
  /// Accepted band for a query's positive fraction |C_q+| / C. Candidate
  /// queries outside the band are redrawn.
  double positive_fraction_min = 0.03;
  double positive_fraction_max = 0.25;
  int max_query_attempts = 400;

  void validate() const;
};

/// Random connected corpus graph with a degree cap: a random tree plus a few
/// chords.
Graph random_corpus_graph(int id, int n, int width, int max_degree, int extra_edges,
                          std::uint64_t seed);

/// Connected subgraph of `source` grown by randomized BFS to `size` nodes;
/// up to `delete_fraction` of its induced edges are then removed while the
/// result stays connected. `delete_fraction = 0` yields the induced subgraph.
Graph extract_query(const Graph& source, int id, int size, double delete_fraction, int width,
                    std::uint64_t seed);

/// Labels of one query against the whole corpus, computed with the exact
/// containment oracle. Returns the relevant corpus IDs, ascending.
std::vector<int> label_query(const Graph& query, const std::vector<Graph>& corpus);

Dataset generate_dataset(const GenConfig& config, std::uint64_t seed);

/// Mean over queries of |positives| / |negatives|.
double mean_positive_ratio(const Dataset& d);

}  // namespace corgii
