#include "corgii/tokenizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "corgii/sinkhorn.hpp"

namespace corgii {

using diff::Tape;
using diff::Tensor;
using diff::Var;

TokenizerMode parse_mode(const std::string& s) {
  if (s == "asymmetric") return TokenizerMode::Asymmetric;
  if (s == "siamese") return TokenizerMode::Siamese;
  throw std::invalid_argument("unknown tokenizer mode '" + s + "' (asymmetric|siamese)");
}

DistanceKind parse_distance(const std::string& s) {
  if (s == "chamfer") return DistanceKind::Chamfer;
  if (s == "injective") return DistanceKind::Injective;
  throw std::invalid_argument("unknown code distance '" + s + "' (chamfer|injective)");
}

std::string to_string(TokenizerMode m) { return m == TokenizerMode::Asymmetric ? "asymmetric" : "siamese"; }
std::string to_string(DistanceKind d) { return d == DistanceKind::Chamfer ? "chamfer" : "injective"; }

TokenizerParams::TokenizerParams(const TokenizerConfig& c, Rng& rng)
    : config(c),
      encoder(c.encoder, rng),
      query_head(c.encoder.dim, c.head_hidden, c.d_bits, rng) {
  if (c.d_bits < 1 || c.d_bits > 20) throw std::invalid_argument("d_bits must be in [1, 20]");
  if (c.mode == TokenizerMode::Asymmetric) corpus_head = nn::Mlp(c.encoder.dim, c.head_hidden, c.d_bits, rng);
}

Var soft_encode(const TokenizerParams& params, Tape& tape, const Graph& g, Side side) {
  return diff::sigmoid(params.head(side)(encode(params.encoder, tape, g)));
}

Tensor soft_encode(const TokenizerParams& params, const Graph& g, Side side) {
  Tape tape;
  return soft_encode(params, tape, g, side).value();
}

SoftCodes soft_encode_with_embeddings(const TokenizerParams& params, const Graph& g, Side side) {
  Tape tape;
  Var x = encode(params.encoder, tape, g);
  Var z = diff::sigmoid(params.head(side)(x));
  return {z.value(), x.value()};
}

Var chamfer(Var zq, Var zc) {
  if (zq.rows() == 0 || zc.rows() == 0) throw std::invalid_argument("chamfer: empty node set");
  return diff::sum(diff::row_min(diff::pairwise_l1(zq, zc)));
}

double chamfer(const Tensor& zq, const Tensor& zc) {
  if (zq.rows() == 0 || zc.rows() == 0) throw std::invalid_argument("chamfer: empty node set");
  if (zq.cols() != zc.cols()) throw diff::ShapeError("chamfer: shape mismatch " + zq.shape() + " vs " + zc.shape());
  double total = 0.0;
  for (int u = 0; u < zq.rows(); ++u) {
    double best = std::numeric_limits<double>::infinity();
    for (int v = 0; v < zc.rows(); ++v) {
      double s = 0.0;
      for (int d = 0; d < zq.cols(); ++d) s += std::fabs(zq(u, d) - zc(v, d));
      best = std::min(best, s);
    }
    total += best;
  }
  return total;
}

Var injective_distance(Var zq, Var zc, int width, double temp, int iters) {
  const int nq = zq.rows();
  if (width < nq || width < zc.rows()) throw diff::ShapeError("injective_distance: width smaller than node count");
  Var q = diff::pad_rows(zq, width);
  Var c = diff::pad_rows(zc, width);
  Var p = sinkhorn(diff::affine(diff::pairwise_l1(q, c), -1.0, 0.0), temp, iters);
  Var diffs = diff::sub(q, diff::matmul(p, c));
  return diff::sum(diff::abs(diff::slice_rows(diffs, 0, nq)));
}

double injective_distance(const Tensor& zq, const Tensor& zc, int width, double temp, int iters) {
  Tape tape;
  return injective_distance(tape.constant(zq), tape.constant(zc), width, temp, iters).item();
}

Var code_distance(const TokenizerParams& params, Var zq, Var zc, int width) {
  if (params.config.distance == DistanceKind::Chamfer) return chamfer(zq, zc);
  return injective_distance(zq, zc, width, params.config.temp, params.config.sinkhorn_iters);
}

Var tokenizer_query_loss(const TokenizerParams& params, Tape& tape, const Dataset& data, const PairSample& sample,
                         double margin) {
  const int width = data.width();
  Var zq = soft_encode(params, tape, data.query_graph(sample.qid), Side::Query);
  auto distances = [&](const std::vector<int>& ids) {
    std::vector<Var> ds;
    for (int cid : ids) {
      Var zc = soft_encode(params, tape, data.corpus_graph(cid), Side::Corpus);
      ds.push_back(code_distance(params, zq, zc, width));
    }
    return diff::concat_rows(ds);
  };
  Var pos = distances(sample.pos);
  Var neg = distances(sample.neg);
  return diff::ranking_hinge(pos, neg, margin, diff::Better::Lower);
}

TrainReport train_tokenizer(TokenizerParams& params, const Dataset& data, const RankTrainConfig& config) {
  QueryLoss<TokenizerParams> loss = [&](const TokenizerParams& p, Tape& tape, const PairSample& s) {
    return tokenizer_query_loss(p, tape, data, s, config.margin);
  };
  return train_ranking(params, data, config, loss);
}

}  // namespace corgii
