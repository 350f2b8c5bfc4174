#include "corgii/dataset.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "corgii/iso.hpp"
#include "corgii/parallel.hpp"
#include "corgii/rng.hpp"

namespace corgii {

int Dataset::width() const {
  int w = 0;
  for (const auto& g : corpus) w = std::max(w, g.width());
  for (const auto& g : queries) w = std::max(w, g.width());
  return w;
}

void Dataset::reindex() {
  corpus_pos_.clear();
  query_pos_.clear();
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus_pos_.emplace(corpus[i].id(), static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate corpus graph id " + std::to_string(corpus[i].id()));
    }
  }
  for (size_t i = 0; i < queries.size(); ++i) {
    if (!query_pos_.emplace(queries[i].id(), static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate query graph id " + std::to_string(queries[i].id()));
    }
  }
}

int Dataset::corpus_index(int id) const {
  auto it = corpus_pos_.find(id);
  if (it == corpus_pos_.end()) throw std::out_of_range("unknown corpus id " + std::to_string(id));
  return it->second;
}

int Dataset::query_index(int id) const {
  auto it = query_pos_.find(id);
  if (it == query_pos_.end()) throw std::out_of_range("unknown query id " + std::to_string(id));
  return it->second;
}

const Graph& Dataset::corpus_graph(int id) const { return corpus[corpus_index(id)]; }
const Graph& Dataset::query_graph(int id) const { return queries[query_index(id)]; }

const std::vector<int>& Dataset::positives(int qid) const {
  static const std::vector<int> kEmpty;
  auto it = relevant.find(qid);
  return it == relevant.end() ? kEmpty : it->second;
}

bool Dataset::is_relevant(int qid, int cid) const {
  const auto& pos = positives(qid);
  return std::binary_search(pos.begin(), pos.end(), cid);
}

std::vector<int> Dataset::negatives(int qid) const {
  std::vector<int> out;
  const auto& pos = positives(qid);
  for (const auto& g : corpus) {
    if (!std::binary_search(pos.begin(), pos.end(), g.id())) out.push_back(g.id());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Dataset::validate() const {
  for (const auto& [qid, ids] : relevant) {
    if (!query_pos_.count(qid)) {
      throw std::invalid_argument("labels reference unknown query " + std::to_string(qid));
    }
    if (!std::is_sorted(ids.begin(), ids.end()) ||
        std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw std::invalid_argument("labels of query " + std::to_string(qid) +
                                  " are not strictly increasing");
    }
    for (int cid : ids) {
      if (!corpus_pos_.count(cid)) {
        throw std::invalid_argument("query " + std::to_string(qid) +
                                    " labels unknown corpus id " + std::to_string(cid));
      }
    }
  }
  std::set<int> seen;
  for (const auto* part : {&split.train, &split.dev, &split.test}) {
    for (int qid : *part) {
      if (!query_pos_.count(qid)) {
        throw std::invalid_argument("split references unknown query " + std::to_string(qid));
      }
      if (!seen.insert(qid).second) {
        throw std::invalid_argument("query " + std::to_string(qid) + " appears in two splits");
      }
    }
  }
  if (!queries.empty() && seen.size() != queries.size()) {
    throw std::invalid_argument("split does not cover every query");
  }
}

void GenConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("infeasible config: " + msg); };
  if (corpus_size < 1 || num_queries < 0) fail("corpus_size must be >= 1 and num_queries >= 0");
  if (corpus_min_nodes < 2 || corpus_min_nodes > corpus_max_nodes) fail("bad corpus node range");
  if (query_min_nodes < 1 || query_min_nodes > query_max_nodes) fail("bad query node range");
  if (query_max_nodes > corpus_max_nodes) fail("query range larger than corpus range");
  if (query_min_nodes > corpus_min_nodes) fail("query_min_nodes exceeds corpus_min_nodes");
  if (corpus_max_nodes > kMaxIsoCorpusNodes || query_max_nodes > kMaxIsoQueryNodes) {
    fail("node ranges exceed the exact containment oracle limits");
  }
  if (max_degree < 2) fail("max_degree must be >= 2");
  if (max_extra_edges < 0) fail("max_extra_edges must be >= 0");
  if (edge_delete_fraction < 0.0 || edge_delete_fraction >= 1.0) fail("edge_delete_fraction in [0,1)");
  if (positive_fraction_min < 0.0 || positive_fraction_min > positive_fraction_max ||
      positive_fraction_max > 1.0) {
    fail("positive fraction band must satisfy 0 <= min <= max <= 1");
  }
  if (max_query_attempts < 1) fail("max_query_attempts must be >= 1");
}

Graph random_corpus_graph(int id, int n, int width, int max_degree, int extra_edges,
                          std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> degree(n, 0);
  std::vector<Edge> edges;
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  auto link = [&](int u, int v) {
    edges.emplace_back(std::min(u, v), std::max(u, v));
    adj[u][v] = adj[v][u] = 1;
    ++degree[u];
    ++degree[v];
  };
  for (int v = 1; v < n; ++v) {
    std::vector<int> open;
    for (int u = 0; u < v; ++u) {
      if (degree[u] < max_degree) open.push_back(u);
    }
    // A tree with max_degree >= 2 always has a node with spare capacity.
    link(open[uniform_int(rng, 0, static_cast<int>(open.size()) - 1)], v);
  }
  for (int k = 0; k < extra_edges; ++k) {
    std::vector<Edge> options;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (!adj[u][v] && degree[u] < max_degree && degree[v] < max_degree) options.emplace_back(u, v);
      }
    }
    if (options.empty()) break;
    auto [u, v] = options[uniform_int(rng, 0, static_cast<int>(options.size()) - 1)];
    link(u, v);
  }
  return Graph(id, n, width, edges);
}

Graph extract_query(const Graph& source, int id, int size, double delete_fraction, int width,
                    std::uint64_t seed) {
  if (size < 1 || size > source.n()) throw std::invalid_argument("query size out of range");
  Rng rng(seed);
  std::vector<int> chosen{uniform_int(rng, 0, source.n() - 1)};
  std::vector<int> local(source.n(), -1);
  local[chosen[0]] = 0;
  while (static_cast<int>(chosen.size()) < size) {
    std::vector<int> frontier;
    for (int u : chosen) {
      for (int v : source.neighbors(u)) {
        if (local[v] < 0) frontier.push_back(v);
      }
    }
    std::sort(frontier.begin(), frontier.end());
    frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
    if (frontier.empty()) break;  // source component exhausted
    int v = frontier[uniform_int(rng, 0, static_cast<int>(frontier.size()) - 1)];
    local[v] = static_cast<int>(chosen.size());
    chosen.push_back(v);
  }
  std::vector<Edge> edges;
  for (auto [u, v] : source.edges()) {
    if (local[u] >= 0 && local[v] >= 0) edges.emplace_back(local[u], local[v]);
  }
  const int k = static_cast<int>(chosen.size());
  const int budget = static_cast<int>(delete_fraction * static_cast<double>(edges.size()));
  const int to_delete = budget > 0 ? uniform_int(rng, 0, budget) : 0;
  for (int d = 0; d < to_delete; ++d) {
    std::vector<int> order(edges.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    shuffle(order.begin(), order.end(), rng);
    bool removed = false;
    for (int idx : order) {
      std::vector<Edge> trial = edges;
      trial.erase(trial.begin() + idx);
      if (Graph(id, k, k, trial).connected()) {
        edges = std::move(trial);
        removed = true;
        break;
      }
    }
    if (!removed) break;  // every remaining edge is a bridge
  }
  return Graph(id, k, width, edges);
}

std::vector<int> label_query(const Graph& query, const std::vector<Graph>& corpus) {
  std::vector<char> hit(corpus.size(), 0);
  parallel_for(corpus.size(), [&](size_t i) { hit[i] = is_subgraph_isomorphic(query, corpus[i]); });
  std::vector<int> out;
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (hit[i]) out.push_back(corpus[i].id());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dataset generate_dataset(const GenConfig& config, std::uint64_t seed) {
  config.validate();
  const int width = config.corpus_max_nodes;
  Dataset d;
  d.corpus.reserve(config.corpus_size);
  Rng rng(mix_seed(seed, 0));
  for (int c = 0; c < config.corpus_size; ++c) {
    const int n = uniform_int(rng, config.corpus_min_nodes, config.corpus_max_nodes);
    const int extra = uniform_int(rng, 0, config.max_extra_edges);
    d.corpus.push_back(random_corpus_graph(c, n, width, config.max_degree, extra, mix_seed(seed, 1000 + c)));
  }

  Rng qrng(mix_seed(seed, 1));
  for (int q = 0; q < config.num_queries; ++q) {
    Graph best;
    std::vector<int> best_labels;
    bool accepted = false;
    for (int attempt = 0; attempt < config.max_query_attempts && !accepted; ++attempt) {
      const int source = uniform_int(qrng, 0, config.corpus_size - 1);
      const Graph& src = d.corpus[source];
      const int hi = std::min(config.query_max_nodes, src.n());
      const int size = uniform_int(qrng, config.query_min_nodes, hi);
      Graph query = extract_query(src, q, size, config.edge_delete_fraction, width, qrng());
      std::vector<int> labels = label_query(query, d.corpus);
      const double frac = static_cast<double>(labels.size()) / config.corpus_size;
      accepted = frac >= config.positive_fraction_min && frac <= config.positive_fraction_max;
      if (accepted || attempt == 0) {
        best = std::move(query);
        best_labels = std::move(labels);
      }
    }
    // After max_query_attempts the first draw is kept; it still has its source
    // graph as a positive.
    d.relevant[q] = std::move(best_labels);
    d.queries.push_back(std::move(best));
  }

  std::vector<int> ids(config.num_queries);
  for (int q = 0; q < config.num_queries; ++q) ids[q] = q;
  Rng srng(mix_seed(seed, 2));
  shuffle(ids.begin(), ids.end(), srng);
  const int n_train = config.num_queries * 6 / 10;
  const int n_dev = config.num_queries * 2 / 10;
  d.split.train.assign(ids.begin(), ids.begin() + n_train);
  d.split.dev.assign(ids.begin() + n_train, ids.begin() + n_train + n_dev);
  d.split.test.assign(ids.begin() + n_train + n_dev, ids.end());
  for (auto* part : {&d.split.train, &d.split.dev, &d.split.test}) std::sort(part->begin(), part->end());
  int used_width = 1;
  for (const auto& g : d.corpus) used_width = std::max(used_width, g.n());
  for (const auto& g : d.queries) used_width = std::max(used_width, g.n());
  for (auto* part : {&d.corpus, &d.queries}) {
    for (auto& g : *part) g = g.repadded(used_width);
  }
  d.reindex();
  d.validate();
  return d;
}

double mean_positive_ratio(const Dataset& d) {
  if (d.queries.empty()) return 0.0;
  double total = 0.0;
  const double c = static_cast<double>(d.corpus.size());
  for (const auto& q : d.queries) {
    const double pos = static_cast<double>(d.positives(q.id()).size());
    total += c > pos ? pos / (c - pos) : 0.0;
  }
  return total / static_cast<double>(d.queries.size());
}

}  // namespace corgii
