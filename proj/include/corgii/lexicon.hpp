#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "corgii/tokenizer.hpp"

namespace corgii {

using Token = std::uint32_t;

/// bit d of a node is Z[u][d] > 0.5 (strict); dimension 0 is the most
/// significant bit of the token.
std::vector<Token> discretize(const diff::Tensor& z);
Token bits_to_token(const std::vector<int>& bits);
std::vector<int> token_to_bits(Token t, int d_bits);

/// Token multiset of one graph. Multiplicities sum to the node count.
struct TokenMultiset {
  int graph_id = 0;
  std::map<Token, int> counts;

  int total() const;
  std::vector<Token> unique() const;
  friend bool operator==(const TokenMultiset&, const TokenMultiset&) = default;
};

TokenMultiset make_multiset(int graph_id, const std::vector<Token>& tokens);
TokenMultiset tokenize_graph(const TokenizerParams& params, const Graph& g, Side side);

/// "gid: tok×mult tok×mult ..."
void dump_tokens(std::ostream& out, const TokenMultiset& m);

}  // namespace corgii
