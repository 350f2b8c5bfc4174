#include "corgii/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "corgii/metrics.hpp"
#include "corgii/reranker.hpp"

namespace corgii {

std::string Strategy::name() const {
  std::string base;
  switch (kind) {
    case ProbeKind::Single: base = "single"; break;
    case ProbeKind::Hamming: base = "hm" + std::to_string(param); break;
    case ProbeKind::Cooccurrence: base = "cm" + std::to_string(param); break;
  }
  return base + (impact ? "_impact" : "_unif");
}

Strategy parse_strategy(const std::string& kind, const std::string& weights, int radius, int expand) {
  Strategy s;
  if (kind == "single") {
    s.kind = ProbeKind::Single;
  } else if (kind == "hm") {
    s.kind = ProbeKind::Hamming;
    s.param = radius;
  } else if (kind == "cm") {
    s.kind = ProbeKind::Cooccurrence;
    s.param = expand;
  } else {
    throw std::invalid_argument("unknown strategy '" + kind + "' (single|hm|cm)");
  }
  if (weights == "impact") {
    s.impact = true;
  } else if (weights != "unif") {
    throw std::invalid_argument("unknown weights '" + weights + "' (unif|impact)");
  }
  return s;
}

Reranker table_reranker(std::map<int, std::map<int, double>> distances) {
  return [table = std::move(distances)](int qid, const std::vector<int>& ids) {
    const auto& row = table.at(qid);
    return rerank(ids, [&](int cid) { return row.at(cid); });
  };
}

Reranker oracle_reranker(const Dataset& data) {
  return [&data](int qid, const std::vector<int>& ids) {
    return rerank(ids, [&](int cid) { return data.is_relevant(qid, cid) ? 0.0 : 1.0; });
  };
}

ScoreMap strategy_scores(const EvalContext& ctx, const Strategy& s, const QueryArtifacts& q) {
  const ImpactParams* single = s.impact ? ctx.impact_single : nullptr;
  const ImpactParams* cm = s.impact ? ctx.impact_cm : nullptr;
  if (s.impact && !(s.kind == ProbeKind::Cooccurrence ? cm : single)) {
    throw std::invalid_argument("strategy " + s.name() + " needs trained impact weights");
  }
  switch (s.kind) {
    case ProbeKind::Single: return score_single(*ctx.index, single, q);
    case ProbeKind::Hamming: return score_hm(*ctx.index, single, q, s.param);
    case ProbeKind::Cooccurrence: return score_cm(*ctx.cooc, cm, q, s.param);
  }
  return {};
}

std::vector<double> delta_grid(std::vector<double> pooled, int points) {
  if (pooled.empty() || points < 1) return {};
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> grid;
  const std::size_t n = pooled.size();
  for (int i = 0; i < points; ++i) {
    const double q = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    // nearest rank: ceil(q n), 1-based, at least 1
    std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    grid.push_back(pooled[rank - 1]);
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<int> evaluated_queries(const EvalContext& ctx, int* excluded) {
  std::vector<int> out;
  for (const auto& [qid, a] : ctx.artifacts) {
    if (ctx.data->positives(qid).empty()) {
      ++*excluded;
      continue;
    }
    out.push_back(qid);
  }
  return out;
}

void sort_rows(std::vector<TradeoffRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const TradeoffRow& a, const TradeoffRow& b) {
    return a.kc < b.kc || (a.kc == b.kc && a.delta > b.delta);
  });
}

}  // namespace

TradeoffReport evaluate(const EvalContext& ctx, const Strategy& s, int points) {
  TradeoffReport report;
  report.strategy = s.name();
  const auto qids = evaluated_queries(ctx, &report.excluded_queries);
  if (qids.empty()) return report;
  const double c = static_cast<double>(ctx.index->corpus_size());

  std::map<int, ScoreMap> scores;
  std::map<int, double> score_ms;
  std::vector<double> pooled;
  for (int qid : qids) {
    const auto t0 = Clock::now();
    scores[qid] = strategy_scores(ctx, s, ctx.artifacts.at(qid));
    score_ms[qid] = ms_since(t0);
    for (const auto& [id, v] : scores[qid]) pooled.push_back(v);
  }
  for (double delta : delta_grid(pooled, points)) {
    TradeoffRow row;
    row.delta = delta;
    double total_ms = 0.0, ap_sum = 0.0, size_sum = 0.0;
    for (int qid : qids) {
      const auto t0 = Clock::now();
      const CandidateSet cand = shortlist(qid, scores[qid], delta);
      const auto ranked = ctx.rerank(qid, cand.ids);
      total_ms += score_ms[qid] + ms_since(t0);
      size_sum += static_cast<double>(cand.ids.size());
      if (cand.ids.empty()) ++row.empty_shortlists;
      ap_sum += average_precision(ranked, ctx.data->positives(qid)).value_or(0.0);
    }
    const double nq = static_cast<double>(qids.size());
    row.kc = size_sum / nq / c;
    row.map = ap_sum / nq;
    row.ms_per_query = total_ms / nq;
    report.rows.push_back(row);
  }
  sort_rows(report.rows);
  return report;
}

TradeoffReport random_baseline(const EvalContext& ctx, const TradeoffReport& reference, int resamples,
                               std::uint64_t seed) {
  TradeoffReport report;
  report.strategy = "random";
  const auto qids = evaluated_queries(ctx, &report.excluded_queries);
  if (qids.empty()) return report;
  const auto& all = ctx.index->doc_ids();
  const double c = static_cast<double>(all.size());
  for (std::size_t r = 0; r < reference.rows.size(); ++r) {
    const int k = static_cast<int>(std::lround(reference.rows[r].kc * c));
    TradeoffRow row;
    row.delta = reference.rows[r].delta;
    row.kc = k / c;
    double ap_sum = 0.0, total_ms = 0.0;
    for (int s = 0; s < resamples; ++s) {
      Rng rng(mix_seed(seed, 1000 * (r + 1) + s));
      for (int qid : qids) {
        const auto t0 = Clock::now();
        std::vector<int> pool = all;
        for (int i = 0; i < k; ++i) std::swap(pool[i], pool[uniform_int(rng, i, static_cast<int>(pool.size()) - 1)]);
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        const auto ranked = ctx.rerank(qid, pool);
        total_ms += ms_since(t0);
        if (k == 0) ++row.empty_shortlists;
        ap_sum += average_precision(ranked, ctx.data->positives(qid)).value_or(0.0);
      }
    }
    const double n = static_cast<double>(qids.size()) * resamples;
    row.map = ap_sum / n;
    row.ms_per_query = total_ms / n;
    report.rows.push_back(row);
  }
  sort_rows(report.rows);
  return report;
}

void write_tradeoff_csv(const TradeoffReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "delta,kC,map,ms_per_query\n";
  out << std::setprecision(17);
  for (const auto& r : report.rows) {
    out << r.delta << ',' << r.kc << ',' << r.map << ',' << std::setprecision(6) << r.ms_per_query
        << std::setprecision(17) << '\n';
  }
}

}  // namespace corgii
