#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "corgii/dataset.hpp"
#include "corgii/nn.hpp"

namespace corgii {

/// Sampled positives and negatives of one query.
struct PairSample {
  int qid = 0;
  std::vector<int> pos;
  std::vector<int> neg;
  std::size_t pairs() const { return pos.size() * neg.size(); }
};

struct RankTrainConfig {
  double margin = 1.0;
  double lr = 1e-3;
  int pos_per_query = 5;
  int neg_per_query = 20;
  int validate_every = 30;
  int patience = 30;         // in validation rounds
  double tolerance = 5e-3;   // minimum dev-loss improvement that resets patience
  int max_steps = 2000;
  std::uint64_t seed = 42;
};

struct TrainReport {
  int steps = 0;
  double initial_dev_loss = 0.0;
  double best_dev_loss = 0.0;
  int best_step = 0;
  int skipped_queries = 0;   // queries with no positives or no negatives
  bool early_stopped = false;
  std::vector<std::pair<int, double>> dev_history;  // (step, dev loss)
};

/// For every query in `qids` that has both positives and negatives, draws up
/// to `npos` positives and `nneg` negatives uniformly without replacement.
/// Queries lacking either side are counted in `skipped`.
std::vector<PairSample> sample_pairs(const Dataset& data, const std::vector<int>& qids, int npos, int nneg, Rng& rng,
                                     int* skipped = nullptr);

/// Per-query loss: summed hinge over the sample's (pos, neg) pairs.
template <typename M>
using QueryLoss = std::function<diff::Var(const M&, diff::Tape&, const PairSample&)>;

/// Mean hinge per pair over `samples`, and optionally its gradient with
/// respect to parameters(model). One tape per query; gradients are merged in
/// sample order.
template <typename M>
double batch_loss(M& model, const std::vector<PairSample>& samples, const QueryLoss<M>& loss,
                  std::vector<diff::Tensor>* grads = nullptr) {
  std::size_t pairs = 0;
  for (const auto& s : samples) pairs += s.pairs();
  if (pairs == 0) return 0.0;
  auto params = nn::parameters(model);
  if (grads) *grads = nn::zeros_like(params);
  double total = 0.0;
  for (const auto& s : samples) {
    diff::Tape tape;
    diff::Var l = loss(model, tape, s);
    total += l.item();
    if (grads) {
      tape.backward(l);
      nn::accumulate(*grads, tape, params);
    }
  }
  const double inv = 1.0 / static_cast<double>(pairs);
  if (grads) nn::scale(*grads, inv);
  return total * inv;
}

/// Margin-ranking training with Adam and early stopping on a fixed dev
/// sample. On return `model` holds the parameters of the best dev loss.
template <typename M>
TrainReport train_ranking(M& model, const Dataset& data, const RankTrainConfig& config, const QueryLoss<M>& loss) {
  TrainReport report;
  Rng rng(mix_seed(config.seed, 77));
  Rng dev_rng(mix_seed(config.seed, 78));
  int skipped_dev = 0;
  const auto dev = sample_pairs(data, data.split.dev, config.pos_per_query, config.neg_per_query, dev_rng, &skipped_dev);
  {
    Rng probe(mix_seed(config.seed, 79));
    sample_pairs(data, data.split.train, 1, 1, probe, &report.skipped_queries);
  }
  report.skipped_queries += skipped_dev;

  auto params = nn::parameters(model);
  nn::Adam adam(config.lr);
  report.initial_dev_loss = batch_loss(model, dev, loss);
  report.best_dev_loss = report.initial_dev_loss;
  report.dev_history.emplace_back(0, report.initial_dev_loss);
  M best = model;
  int bad_rounds = 0;
  for (int step = 1; step <= config.max_steps; ++step) {
    const auto batch = sample_pairs(data, data.split.train, config.pos_per_query, config.neg_per_query, rng);
    std::vector<diff::Tensor> grads;
    batch_loss(model, batch, loss, &grads);
    adam.step(params, grads);
    report.steps = step;
    if (step % config.validate_every != 0 && step != config.max_steps) continue;
    const double dev_loss = batch_loss(model, dev, loss);
    report.dev_history.emplace_back(step, dev_loss);
    if (dev_loss < report.best_dev_loss) {
      const bool significant = dev_loss < report.best_dev_loss - config.tolerance;
      report.best_dev_loss = dev_loss;
      report.best_step = step;
      best = model;
      bad_rounds = significant ? 0 : bad_rounds + 1;
    } else {
      ++bad_rounds;
    }
    if (bad_rounds >= config.patience) {
      report.early_stopped = true;
      break;
    }
  }
  model = best;
  return report;
}

}  // namespace corgii
