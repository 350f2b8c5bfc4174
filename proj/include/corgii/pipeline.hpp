#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "corgii/bundle.hpp"
#include "corgii/config.hpp"
#include "corgii/cooc.hpp"
#include "corgii/dataset.hpp"
#include "corgii/evaluate.hpp"
#include "corgii/impact.hpp"
#include "corgii/index.hpp"
#include "corgii/reranker.hpp"
#include "corgii/stats.hpp"
#include "corgii/tokenizer.hpp"

namespace corgii {

struct PipelineConfig {
  std::uint64_t seed = 42;
  std::string out_dir = "run";
  std::string dataset;  // existing manifest/JSONL/TU directory; empty to generate
  GenConfig gen;
  EncoderConfig encoder;

  BackboneConfig backbone;
  RankTrainConfig backbone_train;
  TokenizerConfig tokenizer;
  RankTrainConfig tokenizer_train;
  int batch_pairs = 3000;  // target hinge pairs per tokenizer/backbone step
  ImpactConfig impact;
  ImpactTrainConfig impact_train;

  std::vector<int> hm_radii{1, 2};
  std::vector<int> cm_expand{4, 32};
  int delta_points = 20;
  int random_resamples = 10;
  double gamma = 0.95;

  PipelineConfig();
  /// Reads every recognized key; unknown keys throw. `seed`, when given,
  /// overrides the file.
  static PipelineConfig from(const Config& c, std::optional<std::uint64_t> seed = std::nullopt);
  /// Canonical key=value text of every setting that influences results.
  std::string canonical() const;
};

struct EvalResults {
  std::map<std::string, TradeoffReport> reports;  // by strategy name
  TradeoffReport random;
  std::string reference;                          // strategy the random baseline follows
};

/// Stage driver. Each accessor loads its artifact from out_dir when present
/// and otherwise computes it (running prerequisites first), then persists it.
/// Stage errors are rethrown as std::runtime_error naming the stage; files
/// written by earlier stages are left in place.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  const PipelineConfig& config() const { return config_; }
  std::string path(const std::string& name) const;

  const Dataset& dataset();
  const BackboneParams& backbone();
  const TokenizerParams& tokenizer();
  const InvertedIndex& index();
  const CoocNeighborhoods& cooc();
  const ImpactParams& impact(ImpactObjective objective);
  CorpusStats stats();
  EvalContext eval_context(const std::vector<int>& qids);
  EvalResults evaluate();
  EvalResults run();

  std::vector<TokenMultiset> corpus_tokens();
  QueryArtifacts artifacts(const Graph& q);
  void log(const std::string& line);

 private:
  template <typename F>
  auto stage(const std::string& name, F&& body) -> decltype(body());
  void save_bundle();
  RankTrainConfig with_batch(RankTrainConfig c) const;

  PipelineConfig config_;
  Bundle bundle_;
  std::ofstream log_;
  std::optional<Dataset> dataset_;
  std::optional<BackboneParams> backbone_;
  std::optional<TokenizerParams> tokenizer_;
  std::optional<InvertedIndex> index_;
  std::unique_ptr<CoocNeighborhoods> cooc_;
  std::optional<ImpactParams> impact_single_;
  std::optional<ImpactParams> impact_cm_;
};

}  // namespace corgii
