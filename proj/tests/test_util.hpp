#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <vector>

#include "corgii/dataset.hpp"
#include "corgii/diff.hpp"
#include "corgii/graph.hpp"
#include "corgii/impact.hpp"
#include "corgii/index.hpp"
#include "corgii/lexicon.hpp"
#include "corgii/nn.hpp"
#include "corgii/rng.hpp"

namespace corgii::testing {

/// Erdos-Renyi graph on n nodes, not necessarily connected.
inline Graph random_graph(Rng& rng, int id, int n, double p, int width) {
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (uniform01(rng) < p) edges.emplace_back(u, v);
    }
  }
  return Graph(id, n, width, edges);
}

inline Graph connected_graph(Rng& rng, int id, int n, int width) {
  return random_corpus_graph(id, n, width, 4, 2, rng());
}

inline diff::Tensor random_tensor(Rng& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
  diff::Tensor t(rows, cols);
  for (double& v : t.values()) v = uniform_real(rng, lo, hi);
  return t;
}

struct FdResult {
  double max_rel_error = 0.0;
  int checked = 0;
};

/// Compares tape gradients of loss() with central differences on `slices`
/// random groups of `per_slice` scalar entries drawn from `params`.
/// Relative error is |a - n| / max(|a|, |n|, floor).
inline FdResult finite_difference_check(const std::vector<diff::Tensor*>& params,
                                        const std::function<diff::Var(diff::Tape&)>& loss, Rng& rng,
                                        int slices = 20, int per_slice = 10, double h = 1e-5,
                                        double floor = 1e-5) {
  diff::Tape tape;
  diff::Var l = loss(tape);
  tape.backward(l);
  std::vector<diff::Tensor> analytic;
  for (diff::Tensor* p : params) {
    const diff::Tensor* g = tape.param_grad(*p);
    analytic.push_back(g ? *g : diff::Tensor(p->rows(), p->cols()));
  }
  std::size_t total = 0;
  for (diff::Tensor* p : params) total += p->size();
  auto value = [&] {
    diff::Tape t;
    return loss(t).item();
  };
  FdResult res;
  for (int s = 0; s < slices; ++s) {
    for (int k = 0; k < per_slice; ++k) {
      std::size_t flat = static_cast<std::size_t>(rng() % total);
      std::size_t pi = 0;
      while (flat >= params[pi]->size()) flat -= params[pi++]->size();
      double& x = params[pi]->values()[flat];
      const double saved = x;
      x = saved + h;
      const double up = value();
      x = saved - h;
      const double down = value();
      x = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[pi].values()[flat];
      const double denom = std::max({std::fabs(a), std::fabs(numeric), floor});
      res.max_rel_error = std::max(res.max_rel_error, std::fabs(a - numeric) / denom);
      ++res.checked;
    }
  }
  return res;
}

inline bool contains_token(const TokenMultiset& m, Token t) { return m.counts.count(t) != 0; }

inline int popcount(Token t) { return static_cast<int>(__builtin_popcount(t)); }

/// Linear-ReLU-linear evaluated with plain loops.
inline std::vector<double> mlp_forward(const nn::Mlp& m, const std::vector<double>& x) {
  auto lin = [](const nn::Linear& l, const std::vector<double>& in) {
    std::vector<double> y(l.out());
    for (int j = 0; j < l.out(); ++j) {
      double s = l.b(0, j);
      for (int i = 0; i < l.in(); ++i) s += in[i] * l.w(i, j);
      y[j] = s;
    }
    return y;
  };
  auto hidden = lin(m.first, x);
  for (double& v : hidden) v = std::max(0.0, v);
  return lin(m.second, hidden);
}

/// Impact weight of (token, embedding row) from the bits and row by loops.
inline double impact_oracle(const nn::Mlp& m, Token t, int d_bits, const diff::Tensor& h, int row) {
  std::vector<double> x;
  for (int d = 0; d < d_bits; ++d) x.push_back(static_cast<double>((t >> (d_bits - 1 - d)) & 1u));
  for (int k = 0; k < h.cols(); ++k) x.push_back(h(row, k));
  return mlp_forward(m, x)[0];
}

using Probes = std::vector<std::pair<Token, double>>;

/// sum_u sum_{(t, w) in probes(u)} w [t in omega(c)], by a direct scan of
/// every corpus multiset. Graphs without any hit are left out.
template <typename ProbesOf>
std::map<int, double> brute_force_scores(const std::vector<TokenMultiset>& corpus, const QueryArtifacts& q,
                                         ProbesOf probes_of) {
  std::vector<Probes> probes;
  for (std::size_t u = 0; u < q.tokens.size(); ++u) probes.push_back(probes_of(static_cast<int>(u)));
  std::map<int, double> out;
  for (const auto& c : corpus) {
    double s = 0.0;
    bool hit = false;
    for (const auto& node : probes) {
      for (const auto& [t, w] : node) {
        if (contains_token(c, t)) {
          s += w;
          hit = true;
        }
      }
    }
    if (hit) out[c.graph_id] = s;
  }
  return out;
}

/// Every token of the vocabulary within Hamming distance r of t.
inline std::vector<Token> hamming_oracle(Token t, int r, int d_bits) {
  std::vector<Token> out;
  for (Token x = 0; x < (Token{1} << d_bits); ++x)
    if (popcount(x ^ t) <= r) out.push_back(x);
  return out;
}

inline double overlap(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  return static_cast<double>(both.size());
}

/// Top-b co-occurring tokens of t with sims from raw posting intersections
/// over the whole vocabulary; ties by ascending token.
inline std::vector<std::pair<Token, double>> cooc_oracle(const InvertedIndex& index, Token t, int b) {
  const Token vocab = Token{1} << index.d_bits();
  std::vector<std::pair<double, Token>> sims;
  double denom = 0.0;
  for (Token x = 0; x < vocab; ++x) denom += overlap(index.posting(t), index.posting(x));
  for (Token x = 0; x < vocab; ++x) {
    const double inter = overlap(index.posting(t), index.posting(x));
    if (inter > 0) sims.emplace_back(inter / denom, x);
  }
  std::sort(sims.begin(), sims.end(),
            [](const auto& a, const auto& c) { return a.first > c.first || (a.first == c.first && a.second < c.second); });
  if (static_cast<int>(sims.size()) > b) sims.resize(b);
  std::vector<std::pair<Token, double>> out;
  for (const auto& [s, x] : sims) out.emplace_back(x, s);
  return out;
}

/// Row and column normalization in probability space, written independently
/// of the log-domain implementation.
inline std::vector<std::vector<double>> sinkhorn_oracle(const std::vector<std::vector<double>>& logits, double temp,
                                                        int iters) {
  const std::size_t n = logits.size();
  std::vector<std::vector<double>> p(n, std::vector<double>(n));
  double mx = -1e300;
  for (const auto& r : logits)
    for (double v : r) mx = std::max(mx, v / temp);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p[i][j] = std::exp(logits[i][j] / temp - mx);
  for (int t = 0; t < iters; ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += p[i][j];
      for (std::size_t i = 0; i < n; ++i) p[i][j] /= s;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += p[i][j];
      for (std::size_t j = 0; j < n; ++j) p[i][j] /= s;
    }
  }
  return p;
}

}  // namespace corgii::testing
