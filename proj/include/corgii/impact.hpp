#pragma once

#include <span>
#include <string>
#include <vector>

#include "corgii/cooc.hpp"
#include "corgii/dataset.hpp"
#include "corgii/index.hpp"
#include "corgii/nn.hpp"
#include "corgii/reranker.hpp"
#include "corgii/tokenizer.hpp"

namespace corgii {

enum class ImpactInput { BackboneH, TokenizerX };
ImpactInput parse_impact_input(const std::string& s);  // "h" | "x"
std::string to_string(ImpactInput in);

struct ImpactConfig {
  int d_bits = 10;
  int dim_h = 10;
  int hidden = 64;
  ImpactInput input = ImpactInput::BackboneH;
};

/// Scalar weight of a token probed on behalf of a query node:
/// w = MLP([bits(token), h]) with bits as 0/1 reals.
struct ImpactParams {
  ImpactConfig config;
  nn::Mlp mlp;

  ImpactParams() = default;
  ImpactParams(const ImpactConfig& config, Rng& rng);

  template <typename F>
  void visit(F&& f) {
    mlp.visit(f);
  }
  template <typename F>
  void visit(F&& f) const {
    mlp.visit(f);
  }
};

/// Everything the probing strategies need about one query: per real node its
/// token and its embedding from the configured source.
struct QueryArtifacts {
  int qid = 0;
  std::vector<Token> tokens;
  diff::Tensor h;  // n x dim_h
  TokenMultiset multiset() const { return make_multiset(qid, tokens); }
};

QueryArtifacts query_artifacts(const Graph& q, const TokenizerParams& tokenizer, const BackboneParams& backbone,
                               ImpactInput input);

/// Rows [bits(tokens[i]), h.row(rows[i])].
diff::Tensor impact_features(const std::vector<Token>& tokens, const std::vector<int>& rows, const diff::Tensor& h,
                             int d_bits);
/// Column of weights, one per feature row.
diff::Var impact_weights(const ImpactParams& params, diff::Var features);
std::vector<double> impact_weights(const ImpactParams& params, const diff::Tensor& features);
double impact_weight(const ImpactParams& params, Token token, std::span<const double> h);

/// S(q, c) = sum_u w(token(u), h(u)) [token(u) in tokens(c)].
ScoreMap score_impact(const InvertedIndex& index, const ImpactParams& params, const QueryArtifacts& q);

/// Which scoring the impact network is trained against.
enum class ImpactObjective {
  SingleProbe,     // each node probes its own token
  FullCooccurrence // each node probes every token, weighted by co-occurrence sim
};

struct ImpactTrainConfig {
  std::vector<double> margins{0.01, 0.1, 1.0};
  double lr = 1e-3;
  int patience = 50;   // epochs
  double tolerance = 5e-3;
  int max_epochs = 20000;
  ImpactObjective objective = ImpactObjective::SingleProbe;
  std::uint64_t seed = 42;
};

struct ImpactTrainReport {
  double margin = 0.0;      // selected margin
  int epochs = 0;
  double initial_dev_loss = 0.0;
  double best_dev_loss = 0.0;
  double dev_map = 0.0;     // MAP of the score ranking on dev queries
  int skipped_queries = 0;
};

/// Fixed per-query training data. Scores factor through token slots:
///   g[slot] = sum over feature rows r probing that slot of sim(r) * w(r)
///   S(c)    = sum over slots whose token c contains of g[slot]
struct ImpactQueryData {
  int qid = 0;
  diff::Tensor features;
  std::vector<diff::SparseEntry> to_slots;   // row = slot, col = feature row, weight = sim
  int slots = 0;
  std::vector<diff::SparseEntry> to_corpus;  // row = corpus position, col = slot, weight 1
  std::vector<int> pos;                      // corpus positions
  std::vector<int> neg;
};

/// Builds the slot structure for one query under `objective`; `cooc` is only
/// read for the co-occurrence objective.
ImpactQueryData impact_query_data(const InvertedIndex& index, const CoocNeighborhoods* cooc, const QueryArtifacts& q,
                                  const Dataset& data, ImpactObjective objective);
/// Summed hinge [S(q,c-) - S(q,c+) + margin]_+ over every (c+, c-) pair.
diff::Var impact_query_loss(const ImpactParams& params, diff::Tape& tape, const ImpactQueryData& d, int corpus_size,
                            double margin);

/// Trains one network per margin and keeps the one with the best dev MAP.
/// `artifacts` must cover the train and dev queries.
ImpactTrainReport train_impact(ImpactParams& params, const Dataset& data, const InvertedIndex& index,
                               const CoocNeighborhoods& cooc, const std::vector<QueryArtifacts>& artifacts,
                               const ImpactTrainConfig& config);

}  // namespace corgii
