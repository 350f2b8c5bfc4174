#include "corgii/cooc.hpp"

#include <algorithm>

#include "corgii/stats.hpp"

namespace corgii {

CoocNeighborhoods::CoocNeighborhoods(const InvertedIndex& index)
    : index_(index),
      once_(new std::once_flag[index.vocabulary()]),
      rows_(index.vocabulary()),
      denominators_(index.vocabulary(), 0.0) {
  for (Token t = 0; t < index.vocabulary(); ++t) {
    if (!index.posting(t).empty()) nonempty_.push_back(t);
  }
}

const std::vector<CoocNeighborhoods::Entry>& CoocNeighborhoods::row(Token t) const {
  const auto& pl = index_.posting(t);  // range check
  std::call_once(once_[t], [&] {
    if (pl.empty()) return;
    std::vector<std::pair<Token, int>> overlaps;
    double total = 0.0;
    for (Token other : nonempty_) {
      const int n = intersection_size(pl, index_.posting(other));
      if (n > 0) {
        overlaps.emplace_back(other, n);
        total += n;
      }
    }
    std::vector<Entry> entries;
    entries.reserve(overlaps.size());
    for (const auto& [other, n] : overlaps) entries.push_back({other, n / total});
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.sim > b.sim || (a.sim == b.sim && a.token < b.token);
    });
    rows_[t] = std::move(entries);
    denominators_[t] = total;
  });
  return rows_[t];
}

std::vector<CoocNeighborhoods::Entry> CoocNeighborhoods::top(Token t, int b) const {
  if (b < 1) throw std::invalid_argument("neighborhood size b must be >= 1");
  const auto& r = row(t);
  return std::vector<Entry>(r.begin(), r.begin() + std::min<std::size_t>(r.size(), static_cast<std::size_t>(b)));
}

double CoocNeighborhoods::sim(Token t, Token other) const {
  for (const auto& e : row(t)) {
    if (e.token == other) return e.sim;
  }
  index_.posting(other);  // range check
  return 0.0;
}

double CoocNeighborhoods::denominator(Token t) const {
  row(t);
  return denominators_[t];
}

}  // namespace corgii
