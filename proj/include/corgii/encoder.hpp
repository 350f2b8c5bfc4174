#pragma once

#include "corgii/graph.hpp"
#include "corgii/nn.hpp"

namespace corgii {

struct EncoderConfig {
  int feature_dim = 1;  // featureless graphs use a constant 1-vector
  int dim = 10;
  int hidden = 20;
  int layers = 5;
};

/// Message-passing encoder shared by the tokenizer and the backbone.
///
///   h0(u)      = init(feature(u))
///   msg(u, v)  = gate(propagate([h(u), h(v)]), h(u))
///   h'(u)      = relu(combine([h(u), sum_v msg(u, v)]))
///
/// The same weights are applied in every layer.
struct EncoderParams {
  EncoderConfig config;
  nn::Linear init;
  nn::Mlp propagate;
  nn::Gru gate;
  nn::Mlp combine;

  EncoderParams() = default;
  EncoderParams(const EncoderConfig& config, Rng& rng);

  template <typename F>
  void visit(F&& f) {
    init.visit(f);
    propagate.visit(f);
    gate.visit(f);
    combine.visit(f);
  }
  template <typename F>
  void visit(F&& f) const {
    init.visit(f);
    propagate.visit(f);
    gate.visit(f);
    combine.visit(f);
  }
};

/// Node embeddings of the n real nodes (n x dim). Padding rows are not
/// materialized; pad with diff::pad_rows where a fixed width is needed.
diff::Var encode(const EncoderParams& params, diff::Tape& tape, const Graph& g);
diff::Tensor encode(const EncoderParams& params, const Graph& g);

}  // namespace corgii
