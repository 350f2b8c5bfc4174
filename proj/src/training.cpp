#include "corgii/training.hpp"

#include <algorithm>

namespace corgii {
namespace {

std::vector<int> draw(const std::vector<int>& pool, int k, Rng& rng) {
  if (static_cast<int>(pool.size()) <= k) return pool;
  // Partial Fisher-Yates over a copy; the result is sorted for stable tapes.
  std::vector<int> v = pool;
  for (int i = 0; i < k; ++i) {
    const int j = uniform_int(rng, i, static_cast<int>(v.size()) - 1);
    std::swap(v[i], v[j]);
  }
  v.resize(k);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::vector<PairSample> sample_pairs(const Dataset& data, const std::vector<int>& qids, int npos, int nneg, Rng& rng,
                                     int* skipped) {
  std::vector<PairSample> out;
  for (int qid : qids) {
    const auto& pos = data.positives(qid);
    const auto neg = data.negatives(qid);
    if (pos.empty() || neg.empty()) {
      if (skipped) ++*skipped;
      continue;
    }
    PairSample s;
    s.qid = qid;
    s.pos = draw(pos, npos, rng);
    s.neg = draw(neg, nneg, rng);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace corgii
