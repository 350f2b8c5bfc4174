#include "corgii/impact.hpp"

#include <algorithm>
#include <map>

#include "corgii/metrics.hpp"

namespace corgii {

using diff::Tape;
using diff::Tensor;
using diff::Var;

ImpactInput parse_impact_input(const std::string& s) {
  if (s == "h") return ImpactInput::BackboneH;
  if (s == "x") return ImpactInput::TokenizerX;
  throw std::invalid_argument("unknown impact input '" + s + "' (h|x)");
}

std::string to_string(ImpactInput in) { return in == ImpactInput::BackboneH ? "h" : "x"; }

ImpactParams::ImpactParams(const ImpactConfig& c, Rng& rng) : config(c), mlp(c.d_bits + c.dim_h, c.hidden, 1, rng) {}

QueryArtifacts query_artifacts(const Graph& q, const TokenizerParams& tokenizer, const BackboneParams& backbone,
                               ImpactInput input) {
  QueryArtifacts a;
  a.qid = q.id();
  SoftCodes codes = soft_encode_with_embeddings(tokenizer, q, Side::Query);
  a.tokens = discretize(codes.z);
  a.h = input == ImpactInput::BackboneH ? encode(backbone.encoder, q) : std::move(codes.x);
  return a;
}

Tensor impact_features(const std::vector<Token>& tokens, const std::vector<int>& rows, const Tensor& h, int d_bits) {
  if (tokens.size() != rows.size()) throw std::invalid_argument("impact_features: tokens and rows differ in length");
  Tensor f(static_cast<int>(tokens.size()), d_bits + h.cols());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const int r = static_cast<int>(i);
    if (tokens[i] >> d_bits) throw std::invalid_argument("impact_features: token wider than D bits");
    for (int d = 0; d < d_bits; ++d) f(r, d) = static_cast<double>((tokens[i] >> (d_bits - 1 - d)) & 1u);
    for (int k = 0; k < h.cols(); ++k) f(r, d_bits + k) = h(rows[i], k);
  }
  return f;
}

Var impact_weights(const ImpactParams& params, Var features) {
  if (features.cols() != params.mlp.in()) {
    throw diff::ShapeError("impact input has " + std::to_string(features.cols()) + " columns, network expects " +
                           std::to_string(params.mlp.in()));
  }
  return params.mlp(features);
}

std::vector<double> impact_weights(const ImpactParams& params, const Tensor& features) {
  if (features.rows() == 0) return {};
  Tape tape;
  return impact_weights(params, tape.constant(features)).value().values();
}

double impact_weight(const ImpactParams& params, Token token, std::span<const double> h) {
  Tensor row = Tensor::from(1, static_cast<int>(h.size()), std::vector<double>(h.begin(), h.end()));
  return impact_weights(params, impact_features({token}, {0}, row, params.config.d_bits)).front();
}

ScoreMap score_impact(const InvertedIndex& index, const ImpactParams& params, const QueryArtifacts& q) {
  std::vector<int> rows(q.tokens.size());
  for (std::size_t u = 0; u < rows.size(); ++u) rows[u] = static_cast<int>(u);
  const auto w = impact_weights(params, impact_features(q.tokens, rows, q.h, params.config.d_bits));
  std::vector<Probe> probes;
  for (std::size_t u = 0; u < q.tokens.size(); ++u) probes.push_back({q.tokens[u], w[u]});
  return index.score(probes);
}

ImpactQueryData impact_query_data(const InvertedIndex& index, const CoocNeighborhoods* cooc, const QueryArtifacts& q,
                                  const Dataset& data, ImpactObjective objective) {
  ImpactQueryData d;
  d.qid = q.qid;
  std::vector<Token> tokens;
  std::vector<int> rows;
  std::vector<double> sims;
  for (std::size_t u = 0; u < q.tokens.size(); ++u) {
    if (objective == ImpactObjective::SingleProbe) {
      tokens.push_back(q.tokens[u]);
      rows.push_back(static_cast<int>(u));
      sims.push_back(1.0);
    } else {
      if (!cooc) throw std::invalid_argument("co-occurrence objective needs neighborhoods");
      for (const auto& e : cooc->row(q.tokens[u])) {
        tokens.push_back(e.token);
        rows.push_back(static_cast<int>(u));
        sims.push_back(e.sim);
      }
    }
  }
  d.features = impact_features(tokens, rows, q.h, index.d_bits());
  std::map<Token, int> slot_of;
  for (std::size_t r = 0; r < tokens.size(); ++r) {
    auto [it, fresh] = slot_of.emplace(tokens[r], static_cast<int>(slot_of.size()));
    d.to_slots.push_back({it->second, static_cast<int>(r), sims[r]});
  }
  d.slots = static_cast<int>(slot_of.size());
  for (const auto& [t, slot] : slot_of) {
    for (int id : index.posting(t)) d.to_corpus.push_back({index.position(id), slot, 1.0});
  }
  for (int cid : data.positives(q.qid)) d.pos.push_back(index.position(cid));
  for (int cid : data.negatives(q.qid)) d.neg.push_back(index.position(cid));
  return d;
}

namespace {

Var corpus_scores(const ImpactParams& params, Tape& tape, const ImpactQueryData& d, int corpus_size) {
  if (d.features.rows() == 0) return tape.constant(Tensor(corpus_size, 1));
  Var w = impact_weights(params, tape.constant(d.features));
  Var g = diff::sparse_matvec(w, d.to_slots, d.slots);
  return diff::sparse_matvec(g, d.to_corpus, corpus_size);
}

}  // namespace

Var impact_query_loss(const ImpactParams& params, Tape& tape, const ImpactQueryData& d, int corpus_size,
                      double margin) {
  Var s = corpus_scores(params, tape, d, corpus_size);
  Var pos = diff::gather_rows(s, d.pos);
  Var neg = diff::gather_rows(s, d.neg);
  return diff::ranking_hinge(pos, neg, margin, diff::Better::Higher);
}

namespace {

struct Split {
  std::vector<ImpactQueryData> queries;
  std::size_t pairs = 0;
};

double split_loss(ImpactParams& params, const Split& split, int corpus_size, double margin,
                  std::vector<Tensor>* grads) {
  if (split.pairs == 0) return 0.0;
  auto ps = nn::parameters(params);
  if (grads) *grads = nn::zeros_like(ps);
  double total = 0.0;
  for (const auto& d : split.queries) {
    Tape tape;
    Var l = impact_query_loss(params, tape, d, corpus_size, margin);
    total += l.item();
    if (grads) {
      tape.backward(l);
      nn::accumulate(*grads, tape, ps);
    }
  }
  const double inv = 1.0 / static_cast<double>(split.pairs);
  if (grads) nn::scale(*grads, inv);
  return total * inv;
}

double split_map(const ImpactParams& params, const Split& split, const InvertedIndex& index) {
  if (split.queries.empty()) return 0.0;
  double total = 0.0;
  for (const auto& d : split.queries) {
    Tape tape;
    const Tensor s = corpus_scores(params, tape, d, index.corpus_size()).value();
    std::vector<int> order(index.corpus_size());
    for (int i = 0; i < index.corpus_size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (s(a, 0) != s(b, 0)) return s(a, 0) > s(b, 0);
      return index.doc_ids()[a] < index.doc_ids()[b];
    });
    std::vector<int> ranked, relevant;
    for (int p : order) ranked.push_back(index.doc_ids()[p]);
    for (int p : d.pos) relevant.push_back(index.doc_ids()[p]);
    total += average_precision(ranked, relevant).value_or(0.0);
  }
  return total / static_cast<double>(split.queries.size());
}

}  // namespace

ImpactTrainReport train_impact(ImpactParams& params, const Dataset& data, const InvertedIndex& index,
                               const CoocNeighborhoods& cooc, const std::vector<QueryArtifacts>& artifacts,
                               const ImpactTrainConfig& config) {
  if (config.margins.empty()) throw std::invalid_argument("train_impact: empty margin grid");
  std::map<int, const QueryArtifacts*> by_id;
  for (const auto& a : artifacts) by_id[a.qid] = &a;
  ImpactTrainReport best_report;
  auto build = [&](const std::vector<int>& qids) {
    Split s;
    for (int qid : qids) {
      auto it = by_id.find(qid);
      if (it == by_id.end()) throw std::invalid_argument("train_impact: missing artifacts for query " + std::to_string(qid));
      ImpactQueryData d = impact_query_data(index, &cooc, *it->second, data, config.objective);
      if (d.pos.empty() || d.neg.empty()) {
        ++best_report.skipped_queries;
        continue;
      }
      s.pairs += d.pos.size() * d.neg.size();
      s.queries.push_back(std::move(d));
    }
    return s;
  };
  const Split train = build(data.split.train);
  const Split dev = build(data.split.dev);
  const int skipped = best_report.skipped_queries;

  bool have_best = false;
  ImpactParams best_params;
  for (std::size_t mi = 0; mi < config.margins.size(); ++mi) {
    const double margin = config.margins[mi];
    Rng rng(mix_seed(config.seed, 300 + mi));
    ImpactParams model(params.config, rng);
    auto ps = nn::parameters(model);
    nn::Adam adam(config.lr);
    ImpactTrainReport report;
    report.margin = margin;
    report.skipped_queries = skipped;
    report.initial_dev_loss = split_loss(model, dev, index.corpus_size(), margin, nullptr);
    report.best_dev_loss = report.initial_dev_loss;
    ImpactParams kept = model;
    int bad = 0;
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
      std::vector<Tensor> grads;
      split_loss(model, train, index.corpus_size(), margin, &grads);
      adam.step(ps, grads);
      report.epochs = epoch;
      const double dev_loss = split_loss(model, dev, index.corpus_size(), margin, nullptr);
      if (dev_loss < report.best_dev_loss) {
        const bool significant = dev_loss < report.best_dev_loss - config.tolerance;
        report.best_dev_loss = dev_loss;
        kept = model;
        bad = significant ? 0 : bad + 1;
      } else {
        ++bad;
      }
      if (bad >= config.patience) break;
    }
    report.dev_map = split_map(kept, dev, index);
    if (!have_best || report.dev_map > best_report.dev_map) {
      best_report = report;
      best_params = kept;
      have_best = true;
    }
  }
  params = best_params;
  return best_report;
}

}  // namespace corgii
