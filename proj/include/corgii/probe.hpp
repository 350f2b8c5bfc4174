#pragma once

#include <vector>

#include "corgii/cooc.hpp"
#include "corgii/impact.hpp"
#include "corgii/index.hpp"

namespace corgii {

/// Every token within Hamming distance r of `t`, ascending. Throws for r > D.
std::vector<Token> hamming_ball(Token t, int r, int d_bits);

// Probing strategies. `impact` selects learned weights; nullptr means every
// probe weighs 1.

/// Each query node probes its own token.
ScoreMap score_single(const InvertedIndex& index, const ImpactParams* impact, const QueryArtifacts& q);
/// Each query node probes every token in its Hamming ball of radius r.
ScoreMap score_hm(const InvertedIndex& index, const ImpactParams* impact, const QueryArtifacts& q, int r);
/// Each query node probes the b tokens that co-occur most with its own token,
/// each weighted by its co-occurrence sim.
ScoreMap score_cm(const CoocNeighborhoods& cooc, const ImpactParams* impact, const QueryArtifacts& q, int b);

/// Graphs whose score is at least delta, ascending id.
struct CandidateSet {
  int qid = 0;
  double delta = 0.0;
  std::vector<int> ids;
  std::vector<double> scores;
};
CandidateSet shortlist(int qid, const ScoreMap& scores, double delta);

}  // namespace corgii
