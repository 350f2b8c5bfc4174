#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "corgii/index.hpp"

namespace corgii {

/// Posting-list overlap between tokens:
///   sim(t, t') = |pl(t) ∩ pl(t')| / sum_{t*} |pl(t) ∩ pl(t*)|,
/// with the denominator taken from t's row. Rows are computed on first use,
/// once per token, and are safe to read from several threads.
class CoocNeighborhoods {
 public:
  struct Entry {
    Token token;
    double sim;
  };

  explicit CoocNeighborhoods(const InvertedIndex& index);
  CoocNeighborhoods(const CoocNeighborhoods&) = delete;
  CoocNeighborhoods& operator=(const CoocNeighborhoods&) = delete;

  /// Every token with sim(t, .) > 0, by sim descending then token ascending.
  /// Empty when pl(t) is empty.
  const std::vector<Entry>& row(Token t) const;
  /// First min(b, |row|) entries of row(t). Tokens beyond have sim 0.
  std::vector<Entry> top(Token t, int b) const;
  double sim(Token t, Token other) const;
  /// sum over t* of |pl(t) ∩ pl(t*)|.
  double denominator(Token t) const;

  const InvertedIndex& index() const { return index_; }

 private:
  const InvertedIndex& index_;
  std::vector<Token> nonempty_;
  std::unique_ptr<std::once_flag[]> once_;
  mutable std::vector<std::vector<Entry>> rows_;
  mutable std::vector<double> denominators_;
};

}  // namespace corgii
