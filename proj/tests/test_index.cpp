#include <doctest.h>

#include <filesystem>
#include <set>

#include "corgii/cooc.hpp"
#include "corgii/index.hpp"
#include "corgii/probe.hpp"
#include "corgii/stats.hpp"
#include "test_util.hpp"

using namespace corgii;
using corgii::testing::brute_force_scores;
using corgii::testing::contains_token;
using corgii::testing::cooc_oracle;
using corgii::testing::hamming_oracle;
using corgii::testing::Probes;
using corgii::testing::impact_oracle;
using corgii::testing::popcount;

namespace {

// Random corpus token multisets with a skewed token distribution.
std::vector<TokenMultiset> random_corpus(Rng& rng, int graphs, int d_bits, int vocab) {
  std::vector<TokenMultiset> out;
  for (int g = 0; g < graphs; ++g) {
    std::vector<Token> tokens;
    const int n = uniform_int(rng, 3, 12);
    for (int u = 0; u < n; ++u) {
      const int k = std::min(uniform_int(rng, 0, vocab - 1), uniform_int(rng, 0, vocab - 1));
      tokens.push_back(static_cast<Token>((k * 37) % (1 << d_bits)));
    }
    out.push_back(make_multiset(g * 3 + 1, tokens));
  }
  return out;
}

QueryArtifacts random_query(Rng& rng, const std::vector<TokenMultiset>& corpus, int d_bits, int dim_h) {
  QueryArtifacts q;
  q.qid = 0;
  const auto& src = corpus[rng() % corpus.size()].counts;
  for (int u = 0; u < 6; ++u) {
    if (uniform01(rng) < 0.7) {
      auto it = src.begin();
      std::advance(it, static_cast<long>(rng() % src.size()));
      q.tokens.push_back(it->first);
    } else {
      q.tokens.push_back(static_cast<Token>(rng() % (1u << d_bits)));
    }
  }
  q.h = corgii::testing::random_tensor(rng, 6, dim_h);
  return q;
}

void check_scores(const ScoreMap& got, const std::map<int, double>& expected, double tol) {
  CHECK(got.size() == expected.size());
  for (const auto& [id, s] : expected) {
    REQUIRE(got.count(id));
    CHECK(std::fabs(got.at(id) - s) <= tol);
  }
}

std::vector<std::vector<double>> power_iteration_top(std::vector<std::vector<double>> a, int k) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> out;
  for (int e = 0; e < k; ++e) {
    std::vector<double> v(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) v[i] += 0.01 * static_cast<double>(i % 7);
    double lambda = 0.0;
    for (int it = 0; it < 5000; ++it) {
      std::vector<double> w(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w[i] += a[i][j] * v[j];
      double norm = 0.0;
      for (double x : w) norm += x * x;
      norm = std::sqrt(norm);
      if (norm == 0.0) break;
      for (double& x : w) x /= norm;
      lambda = norm;
      v = w;
    }
    out.push_back(v);
    out.back().push_back(lambda);
    // Deflate.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i][j] -= lambda * v[i] * v[j];
  }
  return out;
}

}  // namespace

TEST_CASE("index hand case and empty corpus") {
  auto idx = InvertedIndex::build(4, {make_multiset(1, {5, 7}), make_multiset(2, {5})});
  CHECK(idx.posting(5) == std::vector<int>{1, 2});
  CHECK(idx.posting(7) == std::vector<int>{1});
  for (Token t = 0; t < 16; ++t)
    if (t != 5 && t != 7) CHECK(idx.posting(t).empty());
  CHECK_THROWS_AS(idx.posting(16), std::out_of_range);
  auto empty = InvertedIndex::build(4, {});
  CHECK(empty.total_postings() == 0);
  CHECK_THROWS(InvertedIndex::build(4, {make_multiset(1, {1}), make_multiset(1, {2})}));
  CHECK_THROWS(InvertedIndex::build(4, {make_multiset(1, {16})}));
}

TEST_CASE("uniform score hand cases") {
  auto idx = InvertedIndex::build(4, {make_multiset(3, {5, 7})});
  auto s = score_uniform(idx, make_multiset(0, {5, 5, 9}));
  CHECK(s == ScoreMap{{3, 2.0}});
  CHECK(score_uniform(idx, make_multiset(0, {1, 2})).empty());
}

TEST_CASE("index membership, posting consistency and uniform scores match a scan") {
  Rng rng(30);
  const auto corpus = random_corpus(rng, 300, 10, 60);
  const auto idx = InvertedIndex::build(10, corpus);
  std::size_t unique_total = 0;
  for (const auto& c : corpus) unique_total += c.counts.size();
  CHECK(idx.total_postings() == unique_total);
  for (Token t = 0; t < 1024; ++t) {
    const auto& pl = idx.posting(t);
    CHECK(std::is_sorted(pl.begin(), pl.end()));
    CHECK(std::adjacent_find(pl.begin(), pl.end()) == pl.end());
  }
  for (int k = 0; k < 100; ++k) {
    const auto& c = corpus[rng() % corpus.size()];
    const Token t = static_cast<Token>(rng() % 1024);
    const auto& pl = idx.posting(t);
    CHECK(std::binary_search(pl.begin(), pl.end(), c.graph_id) == contains_token(c, t));
    CHECK(idx.contains(c.graph_id, t) == contains_token(c, t));
  }
  for (int k = 0; k < 20; ++k) {
    const auto q = random_query(rng, corpus, 10, 10);
    const auto expected = brute_force_scores(corpus, q, [&](int u) { return std::vector{std::pair{q.tokens[u], 1.0}}; });
    check_scores(score_uniform(idx, q.multiset()), expected, 0.0);
    check_scores(score_single(idx, nullptr, q), expected, 0.0);
  }
}

TEST_CASE("index file round trip is byte-identical") {
  Rng rng(31);
  const auto idx = InvertedIndex::build(10, random_corpus(rng, 200, 10, 80));
  const auto bytes = idx.serialize();
  CHECK(bytes[0] == 'C');
  CHECK(bytes[3] == 'I');
  const auto back = InvertedIndex::deserialize(bytes);
  CHECK(back == idx);
  CHECK(back.serialize() == bytes);
  const auto path = (std::filesystem::temp_directory_path() / "corgii_test_index.bin").string();
  idx.save(path);
  CHECK(InvertedIndex::load(path) == idx);
  auto truncated = bytes;
  truncated.resize(bytes.size() / 2);
  CHECK_THROWS(InvertedIndex::deserialize(truncated));
  std::filesystem::remove(path);
}

TEST_CASE("hamming balls") {
  CHECK(hamming_ball(5, 0, 10) == std::vector<Token>{5});
  CHECK(hamming_ball(5, 3, 10).size() == 176);
  CHECK(hamming_ball(0, 10, 10).size() == 1024);
  CHECK_THROWS(hamming_ball(5, 11, 10));
  Rng rng(32);
  for (int k = 0; k < 10; ++k) {
    const Token t = static_cast<Token>(rng() % 64);
    std::vector<Token> expected;
    for (Token x = 0; x < 64; ++x)
      if (popcount(x ^ t) <= 2) expected.push_back(x);
    CHECK(hamming_ball(t, 2, 6) == expected);
  }
  for (int r = 0; r < 4; ++r) {
    const auto small = hamming_ball(77, r, 10), big = hamming_ball(77, r + 1, 10);
    CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
  }
}

TEST_CASE("co-occurrence similarity hand cases") {
  // pl(1) = {A, B}, pl(2) = {B, C}.
  auto idx = InvertedIndex::build(4, {make_multiset(10, {1}), make_multiset(11, {1, 2}), make_multiset(12, {2})});
  CoocNeighborhoods cooc(idx);
  CHECK(cooc.sim(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(cooc.sim(1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(cooc.denominator(1) == 3.0);
  CHECK(cooc.row(1).front().token == 1);
  CHECK(cooc.row(5).empty());
  CHECK(cooc.sim(5, 1) == 0.0);
  // Disjoint postings: CM reduces to the self token scaled by sim = 1.
  auto disjoint = InvertedIndex::build(4, {make_multiset(1, {3}), make_multiset(2, {4})});
  CoocNeighborhoods dc(disjoint);
  QueryArtifacts q;
  q.tokens = {3};
  q.h = diff::Tensor(1, 10);
  CHECK(score_cm(dc, nullptr, q, 32) == ScoreMap{{1, 1.0}});
}

TEST_CASE("co-occurrence rows are normalized and ordered") {
  Rng rng(33);
  const auto idx = InvertedIndex::build(10, random_corpus(rng, 300, 10, 60));
  CoocNeighborhoods cooc(idx);
  for (Token t = 0; t < 1024; ++t) {
    const auto& row = cooc.row(t);
    if (idx.posting(t).empty()) {
      CHECK(row.empty());
      continue;
    }
    double total = 0.0;
    for (Token o = 0; o < 1024; ++o) total += cooc.sim(t, o);
    CHECK(std::fabs(total - 1.0) <= 1e-12);
    double self = cooc.sim(t, t);
    for (const auto& e : row) {
      CHECK(e.sim <= self);
      CHECK(e.sim > 0.0);
      CHECK(e.sim <= 1.0);
    }
    for (std::size_t i = 1; i < row.size(); ++i) {
      CHECK((row[i - 1].sim > row[i].sim || (row[i - 1].sim == row[i].sim && row[i - 1].token < row[i].token)));
    }
    CHECK(std::any_of(row.begin(), row.end(), [&](const auto& e) { return e.token == t; }));
    // Brute-force denominator.
    double denom = 0.0;
    for (Token o = 0; o < 1024; ++o) denom += intersection_size(idx.posting(t), idx.posting(o));
    CHECK(cooc.denominator(t) == denom);
  }
}

TEST_CASE("probing strategies equal their brute-force equations") {
  Rng rng(34);
  const auto corpus = random_corpus(rng, 400, 10, 80);
  const auto idx = InvertedIndex::build(10, corpus);
  CoocNeighborhoods cooc(idx);
  ImpactConfig ic;
  Rng prng(35);
  ImpactParams impact(ic, prng);
  for (int k = 0; k < 10; ++k) {
    const auto q = random_query(rng, corpus, 10, 10);
    auto w = [&](Token t, int u) { return impact_oracle(impact.mlp, t, 10, q.h, u); };
    // Single probe with impact weights.
    check_scores(score_impact(idx, impact, q), brute_force_scores(corpus, q, [&](int u) {
                   return std::vector{std::pair{q.tokens[u], w(q.tokens[u], u)}};
                 }),
                 1e-9);
    check_scores(score_single(idx, &impact, q), brute_force_scores(corpus, q, [&](int u) {
                   return std::vector{std::pair{q.tokens[u], w(q.tokens[u], u)}};
                 }),
                 1e-9);
    // Hamming: filter the whole vocabulary by distance.
    for (int r : {0, 1, 3}) {
      for (bool weighted : {false, true}) {
        auto probes = [&](int u) {
          Probes out;
          for (Token t : hamming_oracle(q.tokens[u], r, 10)) out.emplace_back(t, weighted ? w(t, u) : 1.0);
          return out;
        };
        const auto got = score_hm(idx, weighted ? &impact : nullptr, q, r);
        check_scores(got, brute_force_scores(corpus, q, probes), weighted ? 1e-9 : 0.0);
      }
    }
    // Co-occurrence: full vocabulary sims from raw intersections, then top b.
    for (int b : {4, 32}) {
      for (bool weighted : {false, true}) {
        auto probes = [&](int u) {
          Probes out;
          for (const auto& [t, sim] : cooc_oracle(idx, q.tokens[u], b))
            out.emplace_back(t, sim * (weighted ? w(t, u) : 1.0));
          return out;
        };
        const auto got = score_cm(cooc, weighted ? &impact : nullptr, q, b);
        check_scores(got, brute_force_scores(corpus, q, probes), 1e-9);
      }
    }
  }
}

TEST_CASE("Hamming scores grow with the radius and the full ball hits every token") {
  Rng rng(36);
  const auto corpus = random_corpus(rng, 100, 6, 30);
  const auto idx = InvertedIndex::build(6, corpus);
  const auto q = random_query(rng, corpus, 6, 10);
  ScoreMap prev;
  for (int r = 0; r <= 6; ++r) {
    const auto s = score_hm(idx, nullptr, q, r);
    for (const auto& [id, v] : prev) CHECK(s.at(id) >= v);
    prev = s;
  }
  for (const auto& c : corpus) {
    CHECK(prev.at(c.graph_id) == static_cast<double>(q.tokens.size() * c.counts.size()));
  }
}

TEST_CASE("shortlists respect the threshold") {
  ScoreMap s{{1, 3.0}, {2, 1.0}, {5, 2.0}, {7, 4.0}};
  CHECK(shortlist(0, s, 0.5).ids == std::vector<int>{1, 2, 5, 7});
  CHECK(shortlist(0, s, 5.0).ids.empty());
  CHECK(shortlist(0, s, 2.0).ids == std::vector<int>{1, 5, 7});
  for (double d1 : {1.0, 2.0, 3.0})
    for (double d2 : {1.0, 2.0, 3.0, 4.0}) {
      if (d1 > d2) continue;
      const auto a = shortlist(0, s, d1).ids, b = shortlist(0, s, d2).ids;
      CHECK(std::includes(a.begin(), a.end(), b.begin(), b.end()));
    }
}

TEST_CASE("stats: rank tables, symmetric co-occurrence, effective rank") {
  Rng rng(37);
  const auto idx = InvertedIndex::build(10, random_corpus(rng, 200, 10, 50));
  const auto st = compute_stats(idx, 0.95);
  CHECK(std::is_sorted(st.token_rank.rbegin(), st.token_rank.rend()));
  CHECK(std::is_sorted(st.doc_rank.rbegin(), st.doc_rank.rend()));
  for (std::size_t i = 0; i < st.tokens.size(); ++i) {
    CHECK(st.cooc[i][i] == static_cast<int>(idx.posting(st.tokens[i]).size()));
    for (std::size_t j = 0; j < st.tokens.size(); ++j) CHECK(st.cooc[i][j] == st.cooc[j][i]);
  }
  CHECK(st.effective_rank <= st.actual_rank);
  CHECK(st.actual_rank <= static_cast<int>(std::min<std::size_t>(st.tokens.size(), idx.corpus_size())));
  CHECK_THROWS(compute_stats(idx, 1.0));
  CHECK_THROWS(compute_stats(idx, 0.0));

  auto single = InvertedIndex::build(4, {make_multiset(1, {3}), make_multiset(2, {3}), make_multiset(3, {3})});
  const auto ss = compute_stats(single, 0.95);
  CHECK(ss.actual_rank == 1);
  CHECK(ss.effective_rank == 1);
  CHECK(effective_rank({3.0, 1.0}, 0.5) == 1);
  CHECK(effective_rank({1.0, 1.0}, 0.5) == 2);
}

TEST_CASE("Jacobi eigenvalues agree with power iteration") {
  Rng rng(38);
  const auto idx = InvertedIndex::build(10, random_corpus(rng, 150, 10, 50));
  const auto st = compute_stats(idx, 0.95);
  const std::size_t n = st.tokens.size();
  std::vector<std::vector<double>> gram(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gram[i][j] = st.cooc[i][j];
  const auto eig = symmetric_eigenvalues(gram);
  const auto top = power_iteration_top(gram, 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::fabs(eig[k] - top[k].back()) <= 1e-6 * std::max(1.0, eig[k]));
    CHECK(std::fabs(st.sigma[k] * st.sigma[k] - eig[k]) <= 1e-6 * std::max(1.0, eig[k]));
  }
  // Small hand matrix with known spectrum {3, 1}.
  const auto two = symmetric_eigenvalues({{2.0, 1.0}, {1.0, 2.0}});
  CHECK(two[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(two[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("effective rank is bounded by the number of distinct profiles") {
  Rng rng(39);
  for (int k : {1, 2, 3, 5, 8}) {
    std::vector<std::vector<Token>> profiles;
    for (int p = 0; p < k; ++p) {
      std::vector<Token> tokens;
      for (int u = 0; u < 4; ++u) tokens.push_back(static_cast<Token>(rng() % 1024));
      profiles.push_back(tokens);
    }
    std::vector<TokenMultiset> corpus;
    for (int g = 0; g < 120; ++g) corpus.push_back(make_multiset(g, profiles[g % k]));
    const auto st = compute_stats(InvertedIndex::build(10, corpus), 0.95);
    CHECK(st.effective_rank <= k);
    CHECK(st.actual_rank <= k);
  }
}
