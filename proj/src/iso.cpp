#include "corgii/iso.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

namespace corgii {
namespace {

struct MatchPlan {
  std::vector<int> order;                  // query nodes in match order
  std::vector<int> parent;                 // earlier-placed neighbor or -1
  std::vector<std::vector<int>> back;      // earlier-placed neighbors of order[k]
};

MatchPlan plan_order(const Graph& q) {
  const int n = q.n();
  MatchPlan plan;
  std::vector<char> placed(n, 0);
  std::vector<int> links(n, 0);  // placed neighbors per node
  for (int k = 0; k < n; ++k) {
    int best = -1;
    for (int u = 0; u < n; ++u) {
      if (placed[u]) continue;
      if (best < 0 || links[u] > links[best] ||
          (links[u] == links[best] && q.degree(u) > q.degree(best))) {
        best = u;
      }
    }
    placed[best] = 1;
    std::vector<int> back;
    for (int v : q.neighbors(best)) {
      if (placed[v] && v != best) back.push_back(v);
      ++links[v];
    }
    plan.order.push_back(best);
    plan.parent.push_back(back.empty() ? -1 : back.front());
    plan.back.push_back(std::move(back));
  }
  return plan;
}

bool degree_dominated(const Graph& q, const Graph& c) {
  std::vector<int> dq(q.n()), dc(c.n());
  for (int u = 0; u < q.n(); ++u) dq[u] = q.degree(u);
  for (int v = 0; v < c.n(); ++v) dc[v] = c.degree(v);
  std::sort(dq.rbegin(), dq.rend());
  std::sort(dc.rbegin(), dc.rend());
  for (size_t i = 0; i < dq.size(); ++i) {
    if (dq[i] > dc[i]) return false;
  }
  return true;
}

}  // namespace

bool is_subgraph_isomorphic(const Graph& query, const Graph& corpus) {
  if (query.n() > kMaxIsoQueryNodes || corpus.n() > kMaxIsoCorpusNodes) {
    throw InstanceTooLarge("instance too large for exact containment check: query n=" +
                           std::to_string(query.n()) + " (max " +
                           std::to_string(kMaxIsoQueryNodes) + "), corpus n=" +
                           std::to_string(corpus.n()) + " (max " +
                           std::to_string(kMaxIsoCorpusNodes) + ")");
  }
  if (query.n() > corpus.n() || query.edge_count() > corpus.edge_count()) return false;
  if (!degree_dominated(query, corpus)) return false;

  const MatchPlan plan = plan_order(query);
  const int n = query.n();
  std::vector<int> image(n, -1);
  std::vector<char> used(corpus.n(), 0);

  auto feasible = [&](int k, int v) {
    const int u = plan.order[k];
    if (used[v] || corpus.degree(v) < query.degree(u)) return false;
    for (int w : plan.back[k]) {
      if (!corpus.adjacent(image[w], v)) return false;
    }
    return true;
  };

  std::function<bool(int)> extend = [&](int k) -> bool {
    if (k == n) return true;
    const int u = plan.order[k];
    auto try_candidate = [&](int v) {
      if (!feasible(k, v)) return false;
      image[u] = v;
      used[v] = 1;
      if (extend(k + 1)) return true;
      used[v] = 0;
      image[u] = -1;
      return false;
    };
    if (plan.parent[k] >= 0) {
      for (int v : corpus.neighbors(image[plan.parent[k]])) {
        if (try_candidate(v)) return true;
      }
    } else {
      for (int v = 0; v < corpus.n(); ++v) {
        if (try_candidate(v)) return true;
      }
    }
    return false;
  };
  return extend(0);
}

}  // namespace corgii
