#include "corgii/reranker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace corgii {

using diff::Tape;
using diff::Tensor;
using diff::Var;

Var sinkhorn(Var logits, double temp, int iters) {
  if (logits.rows() != logits.cols()) throw diff::ShapeError("sinkhorn: logits must be square, got " + logits.value().shape());
  if (temp <= 0.0 || iters < 1) throw std::invalid_argument("sinkhorn: temp > 0 and iters >= 1 required");
  Var x = diff::affine(logits, 1.0 / temp, 0.0);
  for (int t = 0; t < iters; ++t) x = diff::log_normalize_rows(diff::log_normalize_cols(x));
  return diff::exp(x);
}

namespace {

void log_normalize(Tensor& x, bool rows) {
  const int groups = rows ? x.rows() : x.cols();
  const int len = rows ? x.cols() : x.rows();
  for (int g = 0; g < groups; ++g) {
    auto at = [&](int k) -> double& { return rows ? x(g, k) : x(k, g); };
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < len; ++k) mx = std::max(mx, at(k));
    double s = 0.0;
    for (int k = 0; k < len; ++k) s += std::exp(at(k) - mx);
    const double lse = mx + std::log(s);
    for (int k = 0; k < len; ++k) at(k) -= lse;
  }
}

}  // namespace

Tensor sinkhorn(const Tensor& logits, double temp, int iters) {
  if (logits.rows() != logits.cols()) throw diff::ShapeError("sinkhorn: logits must be square, got " + logits.shape());
  if (temp <= 0.0 || iters < 1) throw std::invalid_argument("sinkhorn: temp > 0 and iters >= 1 required");
  Tensor x = logits;
  const double scale = 1.0 / temp;
  for (double& v : x.values()) v *= scale;
  for (int t = 0; t < iters; ++t) {
    log_normalize(x, false);
    log_normalize(x, true);
  }
  for (double& v : x.values()) v = std::exp(v);
  return x;
}

BackboneParams::BackboneParams(const BackboneConfig& c, Rng& rng)
    : config(c), encoder(c.encoder, rng), align(c.encoder.dim, c.align_hidden, c.align_out, rng) {
  if (c.temp <= 0.0 || c.sinkhorn_iters < 1) throw std::invalid_argument("backbone: temp > 0 and T >= 1 required");
}

int BackboneParams::width_for(const Graph& q, const Graph& c) const {
  return std::max({config.width, q.n(), c.n()});
}

Var alignment(const BackboneParams& p, Var hq_pad, Var hc_pad) {
  Var logits = diff::matmul_nt(p.align(hq_pad), p.align(hc_pad));
  return sinkhorn(logits, p.config.temp, p.config.sinkhorn_iters);
}

namespace {

Var hinge_distance(const BackboneParams& p, Var hq, Var hc) {
  Var perm = alignment(p, hq, hc);
  return diff::sum(diff::hinge(diff::sub(hq, diff::matmul(perm, hc))));
}

}  // namespace

Var align_distance(const BackboneParams& p, Tape& tape, const Graph& q, const Graph& c) {
  const int width = p.width_for(q, c);
  Var hq = diff::pad_rows(encode(p.encoder, tape, q), width);
  Var hc = diff::pad_rows(encode(p.encoder, tape, c), width);
  return hinge_distance(p, hq, hc);
}

double align_distance(const BackboneParams& p, const Graph& q, const Graph& c) {
  Tape tape;
  return align_distance(p, tape, q, c).item();
}

PreparedGraph prepare(const BackboneParams& p, const Graph& g, int width) {
  if (width < g.n()) throw std::invalid_argument("prepare: width smaller than node count");
  Tape tape;
  Var h = diff::pad_rows(encode(p.encoder, tape, g), width);
  Var a = p.align(h);
  return {h.value(), a.value()};
}

double align_distance(const BackboneParams& p, const PreparedGraph& q, const PreparedGraph& c) {
  const int m = q.h.rows();
  if (c.h.rows() != m) throw diff::ShapeError("align_distance: prepared widths differ");
  const int k = q.a.cols();
  Tensor logits(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int t = 0; t < k; ++t) s += q.a(i, t) * c.a(j, t);
      logits(i, j) = s;
    }
  }
  const Tensor perm = sinkhorn(logits, p.config.temp, p.config.sinkhorn_iters);
  const int dim = q.h.cols();
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int d = 0; d < dim; ++d) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += perm(i, j) * c.h(j, d);
      const double v = q.h(i, d) - s;
      if (v > 0.0) total += v;
    }
  }
  return total;
}

Var backbone_query_loss(const BackboneParams& p, Tape& tape, const Dataset& data, const PairSample& sample,
                        double margin) {
  const Graph& q = data.query_graph(sample.qid);
  const int width = std::max(p.config.width, data.width());
  Var hq = diff::pad_rows(encode(p.encoder, tape, q), width);
  auto distances = [&](const std::vector<int>& ids) {
    std::vector<Var> ds;
    for (int cid : ids) {
      Var hc = diff::pad_rows(encode(p.encoder, tape, data.corpus_graph(cid)), width);
      ds.push_back(hinge_distance(p, hq, hc));
    }
    return diff::concat_rows(ds);
  };
  Var pos = distances(sample.pos);
  Var neg = distances(sample.neg);
  return diff::ranking_hinge(pos, neg, margin, diff::Better::Lower);
}

TrainReport train_backbone(BackboneParams& params, const Dataset& data, const RankTrainConfig& config) {
  QueryLoss<BackboneParams> loss = [&](const BackboneParams& p, Tape& tape, const PairSample& s) {
    return backbone_query_loss(p, tape, data, s, config.margin);
  };
  return train_ranking(params, data, config, loss);
}

std::vector<int> rerank(const std::vector<int>& ids, const std::function<double(int)>& distance) {
  std::vector<std::pair<double, int>> scored;
  scored.reserve(ids.size());
  for (int id : ids) scored.emplace_back(distance(id), id);
  std::sort(scored.begin(), scored.end());
  std::vector<int> out;
  out.reserve(scored.size());
  for (const auto& [d, id] : scored) out.push_back(id);
  return out;
}

double exact_alignment_distance(const Graph& q, const Graph& c) {
  const int m = std::max(q.n(), c.n());
  if (m > kMaxExactAlignNodes) throw std::invalid_argument("exact_alignment_distance: more than 8 nodes");
  auto aq = [&](int i, int j) { return i < q.n() && j < q.n() && q.adjacent(i, j) ? 1 : 0; };
  auto ac = [&](int i, int j) { return i < c.n() && j < c.n() && c.adjacent(i, j) ? 1 : 0; };
  // (P Ac P^T)[i][j] = Ac[perm[i]][perm[j]] for the permutation matrix with
  // P[i][perm[i]] = 1.
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  int best = std::numeric_limits<int>::max();
  do {
    int cost = 0;
    for (int i = 0; i < m && cost < best; ++i) {
      for (int j = 0; j < m; ++j) cost += std::max(0, aq(i, j) - ac(perm[i], perm[j]));
    }
    best = std::min(best, cost);
  } while (best > 0 && std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best);
}

ApproximationReport approximation_errors(const std::vector<std::pair<Graph, Graph>>& pairs,
                                         const TokenizerParams& tokenizer, const BackboneParams& backbone) {
  ApproximationReport report;
  double soft_sum = 0.0, chamfer_sum = 0.0;
  for (const auto& [q, c] : pairs) {
    if (q.n() > kMaxExactAlignNodes || c.n() > kMaxExactAlignNodes) {
      ++report.skipped;
      continue;
    }
    const double exact = exact_alignment_distance(q, c);
    const int width = backbone.width_for(q, c);
    Tape tape;
    Var hq = diff::pad_rows(encode(backbone.encoder, tape, q), width);
    Var hc = diff::pad_rows(encode(backbone.encoder, tape, c), width);
    const Tensor perm = alignment(backbone, hq, hc).value();
    Var zq = soft_encode(tokenizer, tape, q, Side::Query);
    Var zc = soft_encode(tokenizer, tape, c, Side::Corpus);
    Var zq_pad = diff::pad_rows(zq, width);
    Var zc_pad = diff::pad_rows(zc, width);
    const double soft =
        diff::sum(diff::hinge(diff::sub(zq_pad, diff::matmul(tape.constant(perm), zc_pad)))).item();
    const double cham = chamfer(zq, zc).item();
    soft_sum += std::fabs(exact - soft);
    chamfer_sum += std::fabs(exact - cham);
    ++report.pairs;
  }
  if (report.pairs > 0) {
    report.mean_soft_gap = soft_sum / report.pairs;
    report.mean_chamfer_gap = chamfer_sum / report.pairs;
  }
  return report;
}

}  // namespace corgii
