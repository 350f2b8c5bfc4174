#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "corgii/bundle.hpp"
#include "corgii/config.hpp"
#include "corgii/evaluate.hpp"
#include "corgii/metrics.hpp"
#include "test_util.hpp"

using namespace corgii;

namespace {

// Cumulative precision summed over positions of relevant hits.
double ap_oracle(const std::vector<int>& ranked, const std::set<int>& relevant) {
  double hits = 0.0, total = 0.0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (relevant.count(ranked[i])) {
      hits += 1.0;
      total += hits / static_cast<double>(i + 1);
    }
  }
  return total / static_cast<double>(relevant.size());
}

// Dataset whose corpus graphs are single edges; labels are set by hand.
Dataset toy_dataset(int corpus, int queries, Rng& rng) {
  Dataset d;
  for (int c = 0; c < corpus; ++c) d.corpus.push_back(Graph(c, 2, 2, {{0, 1}}));
  for (int q = 0; q < queries; ++q) {
    d.queries.push_back(Graph(q, 2, 2, {{0, 1}}));
    std::vector<int> rel;
    for (int c = 0; c < corpus; ++c)
      if (uniform01(rng) < 0.2) rel.push_back(c);
    if (rel.empty()) rel.push_back(q % corpus);
    d.relevant[q] = rel;
    d.split.test.push_back(q);
  }
  d.reindex();
  return d;
}

struct ToySetup {
  Dataset data;
  InvertedIndex index;
  std::unique_ptr<CoocNeighborhoods> cooc;
  ImpactParams impact;
  EvalContext ctx;
};

std::unique_ptr<ToySetup> toy_setup(std::uint64_t seed) {
  auto s = std::make_unique<ToySetup>();
  Rng rng(seed);
  s->data = toy_dataset(80, 6, rng);
  std::vector<TokenMultiset> corpus;
  for (int c = 0; c < 80; ++c) {
    std::vector<Token> t;
    for (int u = 0; u < 4; ++u) t.push_back(static_cast<Token>(uniform_int(rng, 0, 15)));
    corpus.push_back(make_multiset(c, t));
  }
  s->index = InvertedIndex::build(4, corpus);
  s->cooc = std::make_unique<CoocNeighborhoods>(s->index);
  ImpactConfig ic;
  ic.d_bits = 4;
  s->impact = ImpactParams(ic, rng);
  s->ctx.data = &s->data;
  s->ctx.index = &s->index;
  s->ctx.cooc = s->cooc.get();
  s->ctx.impact_single = &s->impact;
  s->ctx.impact_cm = &s->impact;
  for (int q = 0; q < 6; ++q) {
    QueryArtifacts a;
    a.qid = q;
    for (int u = 0; u < 3; ++u) a.tokens.push_back(static_cast<Token>(uniform_int(rng, 0, 15)));
    a.h = corgii::testing::random_tensor(rng, 3, 10);
    s->ctx.artifacts.emplace(q, a);
  }
  s->ctx.rerank = oracle_reranker(s->data);
  return s;
}

}  // namespace

TEST_CASE("average precision hand cases") {
  CHECK(*average_precision({1, 2, 3}, {1, 2}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(*average_precision({1, 9, 2}, {1, 2}) - (1.0 + 2.0 / 3.0) / 2.0) < 1e-12);
  CHECK(*average_precision({}, {1}) == 0.0);
  CHECK_FALSE(average_precision({1, 2}, {}).has_value());
  // A relevant item missing from the ranking only lowers recall.
  CHECK(*average_precision({1}, {1, 2}) == 0.5);
}

TEST_CASE("average precision matches a cumulative-precision oracle") {
  Rng rng(40);
  for (int k = 0; k < 100; ++k) {
    std::vector<int> ranked(30);
    std::iota(ranked.begin(), ranked.end(), 0);
    corgii::shuffle(ranked.begin(), ranked.end(), rng);
    ranked.resize(uniform_int(rng, 0, 30));
    std::set<int> rel;
    while (rel.empty())
      for (int i = 0; i < 30; ++i)
        if (uniform01(rng) < 0.2) rel.insert(i);
    const std::vector<int> relv(rel.begin(), rel.end());
    CHECK(std::fabs(*average_precision(ranked, relv) - ap_oracle(ranked, rel)) < 1e-12);
  }
}

TEST_CASE("delta grid picks distinct nearest-rank quantiles") {
  CHECK(delta_grid({}, 5).empty());
  CHECK(delta_grid({4.0, 1.0, 3.0, 2.0}, 5) == std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(delta_grid({2.0, 2.0, 2.0}, 20) == std::vector<double>{2.0});
  const auto g = delta_grid({5, 1, 2, 3, 4, 6, 7, 8, 9, 10}, 3);
  CHECK(g == std::vector<double>{1.0, 5.0, 10.0});
}

TEST_CASE("evaluation with the label oracle as reranker") {
  auto s = toy_setup(41);
  for (const Strategy& st : {Strategy{ProbeKind::Single, 0, false}, Strategy{ProbeKind::Hamming, 2, true},
                             Strategy{ProbeKind::Cooccurrence, 32, false}}) {
    const auto rep = evaluate(s->ctx, st, 20);
    REQUIRE_FALSE(rep.rows.empty());
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& row = rep.rows[i];
      CHECK(row.kc >= 0.0);
      CHECK(row.kc <= 1.0);
      CHECK(row.map >= 0.0);
      CHECK(row.map <= 1.0);
      if (i > 0) {
        CHECK(rep.rows[i - 1].kc <= row.kc);
        // With the oracle, larger shortlists only add recall.
        CHECK(rep.rows[i - 1].map <= row.map + 1e-12);
      }
    }
  }
  // Full vocabulary Hamming ball retrieves every graph; the oracle order is perfect.
  const auto full = evaluate(s->ctx, Strategy{ProbeKind::Hamming, 4, false}, 20);
  CHECK(full.rows.back().kc == 1.0);
  CHECK(full.rows.back().map == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single test query: MAP equals that query's AP") {
  auto s = toy_setup(42);
  for (int q = 1; q < 6; ++q) s->ctx.artifacts.erase(q);
  const Strategy st{ProbeKind::Single, 0, false};
  const auto rep = evaluate(s->ctx, st, 10);
  const auto scores = strategy_scores(s->ctx, st, s->ctx.artifacts.at(0));
  for (const auto& row : rep.rows) {
    const auto cand = shortlist(0, scores, row.delta);
    const double ap = average_precision(s->ctx.rerank(0, cand.ids), s->data.positives(0)).value_or(0.0);
    CHECK(row.map == ap);
    CHECK(row.kc == static_cast<double>(cand.ids.size()) / 80.0);
  }
}

TEST_CASE("queries without positives are excluded and counted") {
  auto s = toy_setup(43);
  s->data.relevant[2].clear();
  const auto rep = evaluate(s->ctx, Strategy{ProbeKind::Single, 0, false}, 10);
  CHECK(rep.excluded_queries == 1);
}

TEST_CASE("random baseline matches reference selectivity and is reproducible") {
  auto s = toy_setup(44);
  const auto ref = evaluate(s->ctx, Strategy{ProbeKind::Cooccurrence, 32, false}, 10);
  const auto a = random_baseline(s->ctx, ref, 10, 7);
  const auto b = random_baseline(s->ctx, ref, 10, 7);
  REQUIRE(a.rows.size() == ref.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].map == b.rows[i].map);
    CHECK(std::fabs(a.rows[i].kc - ref.rows[i].kc) <= 0.5 / 80.0 + 1e-12);
  }
}

TEST_CASE("strategy names and parsing") {
  CHECK(parse_strategy("cm", "impact", 1, 32).name() == "cm32_impact");
  CHECK(parse_strategy("hm", "unif", 2, 32).name() == "hm2_unif");
  CHECK(parse_strategy("single", "unif", 2, 32).name() == "single_unif");
  CHECK_THROWS(parse_strategy("xx", "unif", 1, 1));
  CHECK_THROWS(parse_strategy("cm", "learned", 1, 1));
}

TEST_CASE("tradeoff CSV layout") {
  TradeoffReport r;
  r.strategy = "x";
  r.rows.push_back({0.5, 0.25, 0.75, 1.5, 0});
  const auto path = (std::filesystem::temp_directory_path() / "corgii_test_tradeoff.csv").string();
  write_tradeoff_csv(r, path);
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  CHECK(header == "delta,kC,map,ms_per_query");
  CHECK(line == "0.5,0.25,0.75,1.5");
  std::filesystem::remove(path);
}

TEST_CASE("config parsing and unused keys") {
  auto c = Config::parse("# comment\nseed = 7\nlist = 1, 2,3\nx=0.5\n\nname = abc\n");
  CHECK(c.get_u64("seed", 0) == 7);
  CHECK(c.get_ints("list", {}) == std::vector<int>{1, 2, 3});
  CHECK(c.get_double("x", 0.0) == 0.5);
  CHECK(c.get_int("missing", 4) == 4);
  CHECK(c.unused() == std::vector<std::string>{"name"});
  CHECK_THROWS(Config::parse("novalue\n"));
  CHECK_THROWS(Config::parse("a=1x\n").get_int("a", 0));
}

TEST_CASE("bundle segments round trip and detect corruption") {
  Bundle b;
  b.put("beta", {1, 2, 3});
  b.put("alpha", {9});
  const auto bytes = b.serialize();
  const auto back = Bundle::deserialize(bytes);
  CHECK(back.names() == std::vector<std::string>{"alpha", "beta"});
  CHECK(back.get("beta") == std::vector<std::uint8_t>{1, 2, 3});
  CHECK(back.serialize() == bytes);
  auto corrupt = bytes;
  corrupt.back() ^= 0xFF;
  CHECK_THROWS(Bundle::deserialize(corrupt));
  CHECK_THROWS(b.get("gamma"));

  Rng rng(45);
  TokenizerParams tok(TokenizerConfig{}, rng);
  const auto tb = pack(tok);
  const auto tok2 = unpack_tokenizer(tb);
  CHECK(pack(tok2) == tb);
  Graph g = corgii::testing::connected_graph(rng, 0, 10, 10);
  CHECK(soft_encode(tok2, g, Side::Query) == soft_encode(tok, g, Side::Query));
  ImpactParams imp(ImpactConfig{}, rng);
  CHECK(pack(unpack_impact(pack(imp))) == pack(imp));
  BackboneParams bb(BackboneConfig{}, rng);
  CHECK(pack(unpack_backbone(pack(bb))) == pack(bb));

  const auto path = (std::filesystem::temp_directory_path() / "corgii_test_bundle.bin").string();
  b.save(path);
  CHECK(Bundle::load(path).serialize() == bytes);
  std::filesystem::remove(path);
}
