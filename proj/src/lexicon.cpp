#include "corgii/lexicon.hpp"

#include <stdexcept>

namespace corgii {

std::vector<Token> discretize(const diff::Tensor& z) {
  if (z.cols() > 31) throw std::invalid_argument("discretize: code width above 31 bits");
  std::vector<Token> out(z.rows(), 0);
  for (int u = 0; u < z.rows(); ++u) {
    Token t = 0;
    for (int d = 0; d < z.cols(); ++d) t = (t << 1) | (z(u, d) > 0.5 ? 1u : 0u);
    out[u] = t;
  }
  return out;
}

Token bits_to_token(const std::vector<int>& bits) {
  Token t = 0;
  for (int b : bits) t = (t << 1) | (b ? 1u : 0u);
  return t;
}

std::vector<int> token_to_bits(Token t, int d_bits) {
  std::vector<int> bits(d_bits);
  for (int d = 0; d < d_bits; ++d) bits[d] = (t >> (d_bits - 1 - d)) & 1u;
  return bits;
}

int TokenMultiset::total() const {
  int n = 0;
  for (const auto& [t, m] : counts) n += m;
  return n;
}

std::vector<Token> TokenMultiset::unique() const {
  std::vector<Token> out;
  out.reserve(counts.size());
  for (const auto& [t, m] : counts) out.push_back(t);
  return out;
}

TokenMultiset make_multiset(int graph_id, const std::vector<Token>& tokens) {
  TokenMultiset m;
  m.graph_id = graph_id;
  for (Token t : tokens) ++m.counts[t];
  return m;
}

TokenMultiset tokenize_graph(const TokenizerParams& params, const Graph& g, Side side) {
  return make_multiset(g.id(), discretize(soft_encode(params, g, side)));
}

void dump_tokens(std::ostream& out, const TokenMultiset& m) {
  out << m.graph_id << ':';
  for (const auto& [t, mult] : m.counts) out << ' ' << t << "×" << mult;
  out << '\n';
}

}  // namespace corgii
