#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "corgii/graph_io.hpp"
#include "corgii/iso.hpp"
#include "test_util.hpp"

using namespace corgii;
using corgii::testing::connected_graph;
using corgii::testing::random_graph;

namespace {

Graph triangle(int width = 4) { return Graph(0, 3, width, {{0, 1}, {1, 2}, {0, 2}}); }

Graph complete(int n, int width) {
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return Graph(1, n, width, e);
}

// Tries every injective map of query nodes into corpus nodes.
bool brute_force_contains(const Graph& q, const Graph& c) {
  if (q.n() > c.n()) return false;
  std::vector<int> map(q.n(), -1);
  std::vector<bool> used(c.n(), false);
  std::function<bool(int)> place = [&](int u) {
    if (u == q.n()) {
      for (const auto& [a, b] : q.edges())
        if (!c.adjacent(map[a], map[b])) return false;
      return true;
    }
    for (int v = 0; v < c.n(); ++v) {
      if (used[v]) continue;
      used[v] = true;
      map[u] = v;
      if (place(u + 1)) return true;
      used[v] = false;
    }
    return false;
  };
  return place(0);
}

}  // namespace

TEST_CASE("graph construction pads and folds duplicate edges") {
  Graph g(7, 3, 5, {{0, 1}, {1, 0}, {1, 2}});
  CHECK(g.id() == 7);
  CHECK(g.n() == 3);
  CHECK(g.width() == 5);
  CHECK(g.edge_count() == 2);
  CHECK(g.adjacent(1, 0));
  CHECK_FALSE(g.adjacent(0, 2));
  for (int v = 0; v < 5; ++v) CHECK_FALSE(g.adjacent(4, v));
  CHECK_THROWS(Graph(0, 3, 3, {{0, 0}}));
  CHECK_THROWS(Graph(0, 3, 3, {{0, 3}}));
  CHECK_THROWS(Graph(0, 4, 3, {}));
}

TEST_CASE("permuting and repadding preserve structure") {
  Rng rng(5);
  Graph g = random_graph(rng, 3, 8, 0.4, 8);
  std::vector<int> perm(8);
  std::iota(perm.begin(), perm.end(), 0);
  corgii::shuffle(perm.begin(), perm.end(), rng);
  Graph p = g.permuted(perm);
  CHECK(p.edge_count() == g.edge_count());
  for (const auto& [u, v] : g.edges()) CHECK(p.adjacent(perm[u], perm[v]));
  Graph wide = g.repadded(12);
  CHECK(wide.width() == 12);
  CHECK(wide.edges() == g.edges());
}

TEST_CASE("iso oracle hand cases") {
  CHECK(is_subgraph_isomorphic(triangle(4), complete(4, 4)));
  Graph p4(2, 4, 4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK_FALSE(is_subgraph_isomorphic(triangle(4), p4));
  // Non-induced: a path is contained in a triangle.
  Graph p3(3, 3, 4, {{0, 1}, {1, 2}});
  CHECK(is_subgraph_isomorphic(p3, triangle(4)));
  CHECK_THROWS_AS(is_subgraph_isomorphic(complete(21, 21), complete(21, 21)), InstanceTooLarge);
  CHECK_THROWS_AS(is_subgraph_isomorphic(triangle(31), complete(31, 31)), InstanceTooLarge);
}

TEST_CASE("iso oracle agrees with injective-map enumeration") {
  Rng rng(42);
  int positives = 0;
  for (int t = 0; t < 200; ++t) {
    const int nq = uniform_int(rng, 2, 6);
    const int nc = uniform_int(rng, nq, 9);
    Graph q = random_graph(rng, 0, nq, uniform_real(rng, 0.2, 0.7), 9);
    Graph c = random_graph(rng, 1, nc, uniform_real(rng, 0.2, 0.7), 9);
    const bool expected = brute_force_contains(q, c);
    positives += expected;
    CHECK(is_subgraph_isomorphic(q, c) == expected);
  }
  CHECK(positives > 20);
  CHECK(positives < 180);
}

TEST_CASE("iso oracle self-containment and monotonicity") {
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    Graph g = connected_graph(rng, t, uniform_int(rng, 3, 14), 14);
    CHECK(is_subgraph_isomorphic(g, g));
    // Dropping an edge of a contained query keeps it contained.
    Graph c = connected_graph(rng, 100, 16, 16);
    Graph q = extract_query(c, 0, uniform_int(rng, 3, 8), 0.0, 16, rng());
    REQUIRE(is_subgraph_isomorphic(q, c));
    auto edges = q.edges();
    if (!edges.empty()) {
      edges.erase(edges.begin() + static_cast<long>(rng() % edges.size()));
      CHECK(is_subgraph_isomorphic(Graph(0, q.n(), q.width(), edges), c));
    }
  }
}

TEST_CASE("generated queries are connected and within size bounds") {
  GenConfig cfg;
  cfg.corpus_size = 60;
  cfg.num_queries = 6;
  cfg.positive_fraction_min = 0.0;
  cfg.positive_fraction_max = 1.0;
  Dataset d = generate_dataset(cfg, 3);
  CHECK(d.corpus.size() == 60);
  CHECK(d.queries.size() == 6);
  int max_n = 0;
  for (const auto& g : d.corpus) {
    CHECK(g.connected());
    CHECK(g.n() >= cfg.corpus_min_nodes);
    CHECK(g.n() <= cfg.corpus_max_nodes);
    for (int u = 0; u < g.n(); ++u) CHECK(g.degree(u) <= cfg.max_degree);
    max_n = std::max(max_n, g.n());
  }
  for (const auto& q : d.queries) {
    CHECK(q.connected());
    CHECK(q.n() >= cfg.query_min_nodes);
    CHECK(q.n() <= cfg.query_max_nodes);
    max_n = std::max(max_n, q.n());
  }
  CHECK(d.width() == max_n);
  d.validate();
  // Labels agree with the oracle.
  for (const auto& q : d.queries) {
    for (const auto& c : d.corpus) CHECK(d.is_relevant(q.id(), c.id()) == is_subgraph_isomorphic(q, c));
  }
}

TEST_CASE("query extracted without deletion is contained in its source") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    Graph c = connected_graph(rng, 5, 20, 25);
    Graph q = extract_query(c, 9, uniform_int(rng, 6, 15), 0.0, 25, rng());
    CHECK(q.connected());
    CHECK(is_subgraph_isomorphic(q, c));
    CHECK(label_query(q, {c}) == std::vector<int>{5});
  }
}

TEST_CASE("generation is deterministic and ratio lands in band") {
  GenConfig cfg;
  cfg.corpus_size = 300;
  cfg.num_queries = 10;
  Dataset a = generate_dataset(cfg, 42);
  Dataset b = generate_dataset(cfg, 42);
  CHECK(a == b);
  const double ratio = mean_positive_ratio(a);
  CHECK(ratio >= 0.05);
  CHECK(ratio <= 0.3);
  std::ostringstream sa, sb;
  write_graphs_jsonl(sa, a.corpus);
  write_graphs_jsonl(sb, b.corpus);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("dataset save/load round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "corgii_test_io";
  std::filesystem::remove_all(dir);
  Dataset d;
  d.corpus = {Graph(0, 3, 4, {{0, 1}, {1, 2}}), Graph(1, 4, 4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}),
              Graph(2, 2, 4, {{0, 1}})};
  d.queries = {Graph(0, 2, 4, {{0, 1}}), Graph(1, 3, 4, {{0, 1}, {1, 2}})};
  d.relevant = {{0, {0, 1, 2}}, {1, {0, 1}}};
  d.split.train = {0};
  d.split.test = {1};
  d.reindex();
  d.validate();
  save_corpus(d, dir / "d.json");
  Dataset back = load_corpus(dir / "d.json");
  CHECK(back == d);
  std::filesystem::remove_all(dir);
}

TEST_CASE("jsonl rejects dangling endpoints") {
  std::istringstream in(R"({"id": 0, "n": 5, "edges": [[0, 99]]})");
  try {
    read_graphs_jsonl(in, "bad.jsonl");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("dangling endpoint") != std::string::npos);
    CHECK(std::string(e.what()).find("bad.jsonl:1") != std::string::npos);
  }
}

TEST_CASE("TU-style directory loads hand-built graphs") {
  const auto dir = std::filesystem::temp_directory_path() / "corgii_test_tu";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  // Graph 1: triangle on nodes 1..3; graph 2: path on nodes 4..7.
  std::ofstream(dir / "toy_A.txt") << "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n5, 6\n6, 5\n6, 7\n7, 6\n";
  std::ofstream(dir / "toy_graph_indicator.txt") << "1\n1\n1\n2\n2\n2\n2\n";
  Dataset d = load_tu_directory(dir);
  REQUIRE(d.corpus.size() == 2);
  CHECK(d.width() == 4);
  CHECK(d.corpus[0] == Graph(0, 3, 4, {{0, 1}, {1, 2}, {0, 2}}));
  CHECK(d.corpus[1] == Graph(1, 4, 4, {{0, 1}, {1, 2}, {2, 3}}));
  std::filesystem::remove_all(dir);
}
