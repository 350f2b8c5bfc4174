#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "corgii/lexicon.hpp"

namespace corgii {

/// Corpus id -> score; ids that no probe reached are absent.
using ScoreMap = std::map<int, double>;

/// A probe adds `weight` to every corpus graph in the posting list of `token`.
struct Probe {
  Token token;
  double weight;
};

/// token -> sorted list of corpus graph ids containing it (no multiplicity).
class InvertedIndex {
 public:
  InvertedIndex() = default;
  /// Throws std::invalid_argument on duplicate graph ids or tokens >= 2^D.
  static InvertedIndex build(int d_bits, const std::vector<TokenMultiset>& corpus);

  int d_bits() const { return d_bits_; }
  std::size_t vocabulary() const { return postings_.size(); }
  int corpus_size() const { return static_cast<int>(doc_ids_.size()); }

  /// Throws std::out_of_range for token >= 2^D.
  const std::vector<int>& posting(Token t) const;
  const std::vector<int>& doc_ids() const { return doc_ids_; }
  /// Unique tokens of the graph at `position` in doc_ids(), ascending.
  const std::vector<Token>& doc_tokens(int position) const { return doc_tokens_.at(position); }
  int position(int doc_id) const;
  bool contains(int doc_id, Token t) const;

  /// Sum over tokens of posting length.
  std::size_t total_postings() const;
  /// Bytes held by postings, doc token sets and the id table.
  std::size_t memory_bytes() const;

  /// Accumulates probes in order over a dense per-graph accumulator.
  ScoreMap score(const std::vector<Probe>& probes) const;

  std::vector<std::uint8_t> serialize() const;
  static InvertedIndex deserialize(const std::vector<std::uint8_t>& bytes);
  void save(const std::string& path) const;
  static InvertedIndex load(const std::string& path);

  friend bool operator==(const InvertedIndex& a, const InvertedIndex& b) {
    return a.d_bits_ == b.d_bits_ && a.doc_ids_ == b.doc_ids_ && a.postings_ == b.postings_;
  }

 private:
  void finish();

  int d_bits_ = 0;
  std::vector<int> doc_ids_;
  std::vector<std::vector<int>> postings_;
  std::vector<std::vector<Token>> doc_tokens_;
  std::unordered_map<int, int> position_;
};

/// S(q, c) = sum over query nodes u of [token(u) in tokens(c)]; multiplicity
/// of the query side counts, membership on the corpus side is Boolean.
ScoreMap score_uniform(const InvertedIndex& index, const TokenMultiset& query);

}  // namespace corgii
