#include "corgii/probe.hpp"

#include <algorithm>

namespace corgii {

std::vector<Token> hamming_ball(Token t, int r, int d_bits) {
  if (d_bits < 1 || d_bits > 20) throw std::invalid_argument("hamming_ball: d_bits must be in [1, 20]");
  if (r < 0 || r > d_bits) throw std::invalid_argument("hamming_ball: radius must be in [0, D]");
  const Token limit = Token{1} << d_bits;
  if (t >= limit) throw std::invalid_argument("hamming_ball: token wider than D bits");
  std::vector<Token> out;
  // Walk flip masks of each popcount <= r (Gosper's hack per size).
  out.push_back(t);
  for (int k = 1; k <= r; ++k) {
    Token mask = (Token{1} << k) - 1;
    while (mask < limit) {
      out.push_back(t ^ mask);
      const Token c = mask & (~mask + 1);
      const Token rr = mask + c;
      mask = (((rr ^ mask) >> 2) / c) | rr;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

/// Weights for (token, node) probe rows; 1 everywhere without impact params.
std::vector<double> probe_weights(const ImpactParams* impact, const QueryArtifacts& q, const std::vector<Token>& tokens,
                                  const std::vector<int>& rows, int d_bits) {
  if (!impact) return std::vector<double>(tokens.size(), 1.0);
  return impact_weights(*impact, impact_features(tokens, rows, q.h, d_bits));
}

}  // namespace

ScoreMap score_single(const InvertedIndex& index, const ImpactParams* impact, const QueryArtifacts& q) {
  return score_hm(index, impact, q, 0);
}

ScoreMap score_hm(const InvertedIndex& index, const ImpactParams* impact, const QueryArtifacts& q, int r) {
  std::vector<Token> tokens;
  std::vector<int> rows;
  for (std::size_t u = 0; u < q.tokens.size(); ++u) {
    for (Token t : hamming_ball(q.tokens[u], r, index.d_bits())) {
      tokens.push_back(t);
      rows.push_back(static_cast<int>(u));
    }
  }
  const auto w = probe_weights(impact, q, tokens, rows, index.d_bits());
  std::vector<Probe> probes;
  probes.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) probes.push_back({tokens[i], w[i]});
  return index.score(probes);
}

ScoreMap score_cm(const CoocNeighborhoods& cooc, const ImpactParams* impact, const QueryArtifacts& q, int b) {
  const InvertedIndex& index = cooc.index();
  std::vector<Token> tokens;
  std::vector<int> rows;
  std::vector<double> sims;
  for (std::size_t u = 0; u < q.tokens.size(); ++u) {
    for (const auto& e : cooc.top(q.tokens[u], b)) {
      tokens.push_back(e.token);
      rows.push_back(static_cast<int>(u));
      sims.push_back(e.sim);
    }
  }
  const auto w = probe_weights(impact, q, tokens, rows, index.d_bits());
  std::vector<Probe> probes;
  probes.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) probes.push_back({tokens[i], sims[i] * w[i]});
  return index.score(probes);
}

CandidateSet shortlist(int qid, const ScoreMap& scores, double delta) {
  CandidateSet out;
  out.qid = qid;
  out.delta = delta;
  for (const auto& [id, s] : scores) {
    if (s >= delta) {
      out.ids.push_back(id);
      out.scores.push_back(s);
    }
  }
  return out;
}

}  // namespace corgii
