#include "corgii/metrics.hpp"

#include <unordered_set>

namespace corgii {

std::optional<double> average_precision(const std::vector<int>& ranked, const std::vector<int>& relevant) {
  if (relevant.empty()) return std::nullopt;
  const std::unordered_set<int> rel(relevant.begin(), relevant.end());
  std::unordered_set<int> seen;
  double sum = 0.0;
  int hits = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (!seen.insert(ranked[r]).second) continue;  // repeated ids count once
    if (rel.count(ranked[r])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(rel.size());
}

}  // namespace corgii
