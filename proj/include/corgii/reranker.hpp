#pragma once

#include <functional>
#include <vector>

#include "corgii/dataset.hpp"
#include "corgii/encoder.hpp"
#include "corgii/sinkhorn.hpp"
#include "corgii/tokenizer.hpp"
#include "corgii/training.hpp"

namespace corgii {

struct BackboneConfig {
  EncoderConfig encoder;
  int align_hidden = 25;
  int align_out = 25;
  double temp = 0.1;
  int sinkhorn_iters = 10;
  int width = 0;  // padded node count m; 0 means max(n_q, n_c) per pair
};

/// Alignment model: its own encoder plus one MLP applied to both sides to
/// form the affinity MLP(Hq) MLP(Hc)^T.
struct BackboneParams {
  BackboneConfig config;
  EncoderParams encoder;
  nn::Mlp align;

  BackboneParams() = default;
  BackboneParams(const BackboneConfig& config, Rng& rng);

  int width_for(const Graph& q, const Graph& c) const;

  template <typename F>
  void visit(F&& f) {
    encoder.visit(f);
    align.visit(f);
  }
  template <typename F>
  void visit(F&& f) const {
    encoder.visit(f);
    align.visit(f);
  }
};

/// Soft alignment P between query and corpus nodes (width x width).
diff::Var alignment(const BackboneParams& params, diff::Var hq_pad, diff::Var hc_pad);

/// d(q, c) = sum [Hq - P Hc]_+ over padded embeddings. Asymmetric, >= 0.
diff::Var align_distance(const BackboneParams& params, diff::Tape& tape, const Graph& q, const Graph& c);
double align_distance(const BackboneParams& params, const Graph& q, const Graph& c);

/// Per-graph quantities reused across many distance evaluations.
struct PreparedGraph {
  diff::Tensor h;  // width x dim, zero padding rows
  diff::Tensor a;  // width x align_out
};
PreparedGraph prepare(const BackboneParams& params, const Graph& g, int width);
/// Same value as align_distance for graphs prepared at a common width.
double align_distance(const BackboneParams& params, const PreparedGraph& q, const PreparedGraph& c);

diff::Var backbone_query_loss(const BackboneParams& params, diff::Tape& tape, const Dataset& data,
                              const PairSample& sample, double margin);
TrainReport train_backbone(BackboneParams& params, const Dataset& data, const RankTrainConfig& config);

/// Ascending distance, ties by ascending ID.
std::vector<int> rerank(const std::vector<int>& ids, const std::function<double(int)>& distance);

struct ApproximationReport {
  int pairs = 0;
  int skipped = 0;                 // pairs with a graph above the node limit
  double mean_soft_gap = 0.0;      // mean |dist* - dist_soft|
  double mean_chamfer_gap = 0.0;   // mean |dist* - dist_chamfer|
};

constexpr int kMaxExactAlignNodes = 8;

/// min over permutations P of sum [Aq - P Ac P^T]_+ with both adjacency
/// matrices padded to max(n_q, n_c) <= kMaxExactAlignNodes.
double exact_alignment_distance(const Graph& q, const Graph& c);

/// Compares exact_alignment_distance against the soft-permutation code
/// distance sum [Zq - P Zc]_+ (P from the backbone) and the chamfer distance.
ApproximationReport approximation_errors(const std::vector<std::pair<Graph, Graph>>& pairs,
                                         const TokenizerParams& tokenizer, const BackboneParams& backbone);

}  // namespace corgii
