#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "corgii/cooc.hpp"
#include "corgii/dataset.hpp"
#include "corgii/impact.hpp"
#include "corgii/probe.hpp"

namespace corgii {

enum class ProbeKind { Single, Hamming, Cooccurrence };

struct Strategy {
  ProbeKind kind = ProbeKind::Single;
  int param = 0;       // radius for Hamming, b for Cooccurrence
  bool impact = false; // learned weights instead of uniform ones
  /// e.g. "single_unif", "hm2_impact", "cm32_impact".
  std::string name() const;
};
Strategy parse_strategy(const std::string& kind, const std::string& weights, int radius, int expand);

/// Orders a shortlist for one query.
using Reranker = std::function<std::vector<int>(int qid, const std::vector<int>& ids)>;

/// Ascending distance from a precomputed table, ties by id.
Reranker table_reranker(std::map<int, std::map<int, double>> distances);
/// Relevant graphs first, then ascending id: the best possible order.
Reranker oracle_reranker(const Dataset& data);

struct EvalContext {
  const Dataset* data = nullptr;
  const InvertedIndex* index = nullptr;
  const CoocNeighborhoods* cooc = nullptr;
  const ImpactParams* impact_single = nullptr;  // single probe and Hamming
  const ImpactParams* impact_cm = nullptr;      // co-occurrence probing
  std::map<int, QueryArtifacts> artifacts;      // evaluated queries
  Reranker rerank;
};

ScoreMap strategy_scores(const EvalContext& ctx, const Strategy& s, const QueryArtifacts& q);

/// Distinct nearest-rank quantiles i/(points-1), i = 0..points-1, of the
/// pooled scores, ascending.
std::vector<double> delta_grid(std::vector<double> pooled, int points);

struct TradeoffRow {
  double delta = 0.0;
  double kc = 0.0;
  double map = 0.0;
  double ms_per_query = 0.0;
  int empty_shortlists = 0;
};

struct TradeoffReport {
  std::string strategy;
  std::vector<TradeoffRow> rows;  // ascending k/C
  int excluded_queries = 0;       // queries without positives
};

TradeoffReport evaluate(const EvalContext& ctx, const Strategy& s, int points);

/// For each row of `reference`, draws k = round(mean |R_q|) graphs uniformly
/// without replacement per query, reranks them, and averages MAP over
/// `resamples` draws.
TradeoffReport random_baseline(const EvalContext& ctx, const TradeoffReport& reference, int resamples,
                               std::uint64_t seed);

void write_tradeoff_csv(const TradeoffReport& report, const std::string& path);

}  // namespace corgii
