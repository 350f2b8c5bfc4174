#pragma once

#include <string>

#include "corgii/dataset.hpp"
#include "corgii/encoder.hpp"
#include "corgii/training.hpp"

namespace corgii {

enum class Side { Query, Corpus };
enum class TokenizerMode { Asymmetric, Siamese };
enum class DistanceKind { Chamfer, Injective };

TokenizerMode parse_mode(const std::string& s);
DistanceKind parse_distance(const std::string& s);
std::string to_string(TokenizerMode m);
std::string to_string(DistanceKind d);

struct TokenizerConfig {
  EncoderConfig encoder;
  int d_bits = 10;
  int head_hidden = 64;
  TokenizerMode mode = TokenizerMode::Asymmetric;
  DistanceKind distance = DistanceKind::Chamfer;
  double temp = 0.1;       // injective distance only
  int sinkhorn_iters = 10; // injective distance only
};

/// Encoder plus per-side heads producing soft codes in (0,1)^D. In siamese
/// mode only the query head exists and serves both sides.
struct TokenizerParams {
  TokenizerConfig config;
  EncoderParams encoder;
  nn::Mlp query_head;
  nn::Mlp corpus_head;

  TokenizerParams() = default;
  TokenizerParams(const TokenizerConfig& config, Rng& rng);

  const nn::Mlp& head(Side side) const {
    return side == Side::Corpus && config.mode == TokenizerMode::Asymmetric ? corpus_head : query_head;
  }

  template <typename F>
  void visit(F&& f) {
    encoder.visit(f);
    query_head.visit(f);
    if (config.mode == TokenizerMode::Asymmetric) corpus_head.visit(f);
  }
  template <typename F>
  void visit(F&& f) const {
    encoder.visit(f);
    query_head.visit(f);
    if (config.mode == TokenizerMode::Asymmetric) corpus_head.visit(f);
  }
};

/// Soft codes of the n real nodes (n x D).
diff::Var soft_encode(const TokenizerParams& params, diff::Tape& tape, const Graph& g, Side side);
diff::Tensor soft_encode(const TokenizerParams& params, const Graph& g, Side side);
/// Both the soft codes and the encoder output x they were computed from.
struct SoftCodes {
  diff::Tensor z;
  diff::Tensor x;
};
SoftCodes soft_encode_with_embeddings(const TokenizerParams& params, const Graph& g, Side side);

/// sum over query rows of the L1 distance to the nearest corpus row.
diff::Var chamfer(diff::Var zq, diff::Var zc);
double chamfer(const diff::Tensor& zq, const diff::Tensor& zc);

/// ||Zq - P Zc||_1 over the real query rows, with both sides zero-padded to
/// `width` rows and P = sinkhorn(-pairwise_l1(Zq, Zc), temp, iters).
diff::Var injective_distance(diff::Var zq, diff::Var zc, int width, double temp, int iters);
double injective_distance(const diff::Tensor& zq, const diff::Tensor& zc, int width, double temp, int iters);

/// Distance selected by params.config.distance.
diff::Var code_distance(const TokenizerParams& params, diff::Var zq, diff::Var zc, int width);

/// Summed hinge [d(q,c+) - d(q,c-) + margin]_+ over all sampled pairs of one
/// query; the per-query loss term of tokenizer training.
diff::Var tokenizer_query_loss(const TokenizerParams& params, diff::Tape& tape, const Dataset& data,
                               const PairSample& sample, double margin);

TrainReport train_tokenizer(TokenizerParams& params, const Dataset& data, const RankTrainConfig& config);

}  // namespace corgii
