#include "corgii/index.hpp"

#include <algorithm>
#include <stdexcept>

#include "corgii/serial.hpp"

namespace corgii {
namespace {

constexpr char kMagic[4] = {'C', 'G', 'I', 'I'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

InvertedIndex InvertedIndex::build(int d_bits, const std::vector<TokenMultiset>& corpus) {
  if (d_bits < 1 || d_bits > 20) throw std::invalid_argument("index: d_bits must be in [1, 20]");
  InvertedIndex idx;
  idx.d_bits_ = d_bits;
  idx.postings_.assign(std::size_t{1} << d_bits, {});
  const Token limit = Token{1} << d_bits;
  for (const auto& m : corpus) {
    for (const auto& [t, mult] : m.counts) {
      if (t >= limit) throw std::invalid_argument("index: token " + std::to_string(t) + " exceeds 2^D");
    }
    idx.doc_ids_.push_back(m.graph_id);
  }
  std::vector<int> sorted = idx.doc_ids_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("index: duplicate graph id " +
                                std::to_string(*std::adjacent_find(sorted.begin(), sorted.end())));
  }
  for (const auto& m : corpus) {
    for (const auto& [t, mult] : m.counts) idx.postings_[t].push_back(m.graph_id);
  }
  for (auto& pl : idx.postings_) std::sort(pl.begin(), pl.end());
  idx.finish();
  return idx;
}

void InvertedIndex::finish() {
  position_.clear();
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) position_.emplace(doc_ids_[i], static_cast<int>(i));
  doc_tokens_.assign(doc_ids_.size(), {});
  for (std::size_t t = 0; t < postings_.size(); ++t) {
    for (int id : postings_[t]) doc_tokens_[position_.at(id)].push_back(static_cast<Token>(t));
  }
}

const std::vector<int>& InvertedIndex::posting(Token t) const {
  if (t >= postings_.size()) {
    throw std::out_of_range("token " + std::to_string(t) + " outside vocabulary of size " +
                            std::to_string(postings_.size()));
  }
  return postings_[t];
}

int InvertedIndex::position(int doc_id) const {
  auto it = position_.find(doc_id);
  if (it == position_.end()) throw std::out_of_range("unknown corpus id " + std::to_string(doc_id));
  return it->second;
}

bool InvertedIndex::contains(int doc_id, Token t) const {
  const auto& pl = posting(t);
  return std::binary_search(pl.begin(), pl.end(), doc_id);
}

std::size_t InvertedIndex::total_postings() const {
  std::size_t n = 0;
  for (const auto& pl : postings_) n += pl.size();
  return n;
}

std::size_t InvertedIndex::memory_bytes() const {
  std::size_t bytes = sizeof(*this) + doc_ids_.capacity() * sizeof(int);
  for (const auto& pl : postings_) bytes += sizeof(pl) + pl.capacity() * sizeof(int);
  for (const auto& dt : doc_tokens_) bytes += sizeof(dt) + dt.capacity() * sizeof(Token);
  bytes += position_.size() * (2 * sizeof(int) + sizeof(void*));
  return bytes;
}

ScoreMap InvertedIndex::score(const std::vector<Probe>& probes) const {
  std::vector<double> acc(doc_ids_.size(), 0.0);
  std::vector<char> hit(doc_ids_.size(), 0);
  for (const auto& p : probes) {
    for (int id : posting(p.token)) {
      const int pos = position_.at(id);
      acc[pos] += p.weight;
      hit[pos] = 1;
    }
  }
  ScoreMap out;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (hit[i]) out.emplace(doc_ids_[i], acc[i]);
  }
  return out;
}

std::vector<std::uint8_t> InvertedIndex::serialize() const {
  ByteWriter w;
  for (char ch : kMagic) w.u8(static_cast<std::uint8_t>(ch));
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(d_bits_));
  w.u32(static_cast<std::uint32_t>(doc_ids_.size()));
  for (int id : doc_ids_) w.varint(static_cast<std::uint32_t>(id));
  for (const auto& pl : postings_) {
    w.varint(pl.size());
    int prev = 0;
    for (int id : pl) {
      w.varint(static_cast<std::uint32_t>(id - prev));
      prev = id;
    }
  }
  return w.take();
}

InvertedIndex InvertedIndex::deserialize(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes, "index file");
  for (char ch : kMagic) {
    if (r.u8() != static_cast<std::uint8_t>(ch)) throw std::runtime_error("index file: bad magic");
  }
  if (r.u32() != kVersion) throw std::runtime_error("index file: unsupported version");
  InvertedIndex idx;
  idx.d_bits_ = static_cast<int>(r.u32());
  if (idx.d_bits_ < 1 || idx.d_bits_ > 20) throw std::runtime_error("index file: bad code width");
  const std::uint32_t c = r.u32();
  for (std::uint32_t i = 0; i < c; ++i) idx.doc_ids_.push_back(static_cast<int>(r.varint()));
  idx.postings_.assign(std::size_t{1} << idx.d_bits_, {});
  for (auto& pl : idx.postings_) {
    const std::uint64_t len = r.varint();
    if (len > c) throw std::runtime_error("index file: posting longer than corpus");
    int prev = 0;
    for (std::uint64_t k = 0; k < len; ++k) {
      prev += static_cast<int>(r.varint());
      pl.push_back(prev);
    }
  }
  r.expect_done();
  idx.finish();
  return idx;
}

void InvertedIndex::save(const std::string& path) const { write_file(path, serialize()); }

InvertedIndex InvertedIndex::load(const std::string& path) { return deserialize(read_file(path)); }

ScoreMap score_uniform(const InvertedIndex& index, const TokenMultiset& query) {
  std::vector<Probe> probes;
  for (const auto& [t, mult] : query.counts) probes.push_back({t, static_cast<double>(mult)});
  return index.score(probes);
}

}  // namespace corgii
