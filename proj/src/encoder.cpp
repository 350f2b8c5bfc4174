#include "corgii/encoder.hpp"

namespace corgii {

using diff::Tape;
using diff::Tensor;
using diff::Var;

EncoderParams::EncoderParams(const EncoderConfig& c, Rng& rng)
    : config(c),
      init(c.feature_dim, c.dim, rng),
      propagate(2 * c.dim, c.hidden, c.dim, rng),
      gate(c.dim, c.dim, rng),
      combine(2 * c.dim, c.hidden, c.dim, rng) {
  if (c.feature_dim < 1 || c.dim < 1 || c.hidden < 1 || c.layers < 0) {
    throw std::invalid_argument("encoder dimensions must be positive");
  }
}

Var encode(const EncoderParams& p, Tape& tape, const Graph& g) {
  const int n = g.n();
  std::vector<int> dst, src;
  for (int u = 0; u < n; ++u) {
    for (int v : g.neighbors(u)) {
      dst.push_back(u);
      src.push_back(v);
    }
  }
  Var h = p.init(tape.constant(Tensor(n, p.config.feature_dim, 1.0)));
  for (int layer = 0; layer < p.config.layers; ++layer) {
    Var hu = diff::gather_rows(h, dst);
    Var hv = diff::gather_rows(h, src);
    Var msg = p.gate(p.propagate(diff::concat_cols(hu, hv)), hu);
    Var agg = diff::scatter_add_rows(msg, dst, n);
    h = diff::relu(p.combine(diff::concat_cols(h, agg)));
  }
  return h;
}

Tensor encode(const EncoderParams& params, const Graph& g) {
  Tape tape;
  return encode(params, tape, g).value();
}

}  // namespace corgii
