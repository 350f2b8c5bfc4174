#include "corgii/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "corgii/graph_io.hpp"
#include "corgii/lexicon.hpp"
#include "corgii/parallel.hpp"

namespace corgii {
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream s;
  s << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

void read_rank_config(const Config& c, const std::string& prefix, RankTrainConfig& r) {
  r.margin = c.get_double(prefix + "margin", r.margin);
  r.lr = c.get_double(prefix + "lr", r.lr);
  r.pos_per_query = c.get_int(prefix + "pos_per_query", r.pos_per_query);
  r.validate_every = c.get_int(prefix + "validate_every", r.validate_every);
  r.patience = c.get_int(prefix + "patience", r.patience);
  r.tolerance = c.get_double(prefix + "tolerance", r.tolerance);
  r.max_steps = c.get_int(prefix + "max_steps", r.max_steps);
}

void write_rank_config(std::ostringstream& o, const std::string& prefix, const RankTrainConfig& r) {
  o << prefix << "margin=" << r.margin << '\n'
    << prefix << "lr=" << r.lr << '\n'
    << prefix << "pos_per_query=" << r.pos_per_query << '\n'
    << prefix << "validate_every=" << r.validate_every << '\n'
    << prefix << "patience=" << r.patience << '\n'
    << prefix << "tolerance=" << r.tolerance << '\n'
    << prefix << "max_steps=" << r.max_steps << '\n';
}

}  // namespace

PipelineConfig::PipelineConfig() {
  backbone_train.margin = 0.5;
  tokenizer_train.margin = 10.0;
}

PipelineConfig PipelineConfig::from(const Config& c, std::optional<std::uint64_t> seed) {
  PipelineConfig p;
  p.seed = c.get_u64("seed", p.seed);
  if (seed) p.seed = *seed;
  p.out_dir = c.get("out_dir", p.out_dir);
  p.dataset = c.get("dataset", p.dataset);

  GenConfig& g = p.gen;
  g.corpus_size = c.get_int("corpus_size", g.corpus_size);
  g.num_queries = c.get_int("num_queries", g.num_queries);
  g.corpus_min_nodes = c.get_int("corpus_min_nodes", g.corpus_min_nodes);
  g.corpus_max_nodes = c.get_int("corpus_max_nodes", g.corpus_max_nodes);
  g.query_min_nodes = c.get_int("query_min_nodes", g.query_min_nodes);
  g.query_max_nodes = c.get_int("query_max_nodes", g.query_max_nodes);
  g.max_degree = c.get_int("max_degree", g.max_degree);
  g.max_extra_edges = c.get_int("max_extra_edges", g.max_extra_edges);
  g.edge_delete_fraction = c.get_double("edge_delete_fraction", g.edge_delete_fraction);
  g.positive_fraction_min = c.get_double("positive_fraction_min", g.positive_fraction_min);
  g.positive_fraction_max = c.get_double("positive_fraction_max", g.positive_fraction_max);
  g.max_query_attempts = c.get_int("max_query_attempts", g.max_query_attempts);

  p.encoder.layers = c.get_int("layers", p.encoder.layers);
  p.encoder.dim = c.get_int("dim_h", p.encoder.dim);
  p.encoder.hidden = c.get_int("encoder_hidden", p.encoder.hidden);

  p.backbone.temp = c.get_double("temp", p.backbone.temp);
  p.backbone.sinkhorn_iters = c.get_int("sinkhorn_iters", p.backbone.sinkhorn_iters);
  p.backbone.align_hidden = c.get_int("align_hidden", p.backbone.align_hidden);
  p.backbone.align_out = c.get_int("align_out", p.backbone.align_out);
  read_rank_config(c, "backbone_", p.backbone_train);

  p.tokenizer.d_bits = c.get_int("d_bits", p.tokenizer.d_bits);
  p.tokenizer.head_hidden = c.get_int("head_hidden", p.tokenizer.head_hidden);
  p.tokenizer.mode = parse_mode(c.get("mode", to_string(p.tokenizer.mode)));
  p.tokenizer.distance = parse_distance(c.get("distance", to_string(p.tokenizer.distance)));
  // Unprefixed keys belong to the tokenizer.
  read_rank_config(c, "", p.tokenizer_train);
  p.batch_pairs = c.get_int("batch_pairs", p.batch_pairs);

  p.impact_train.margins = c.get_doubles("impact_margin", p.impact_train.margins);
  p.impact.input = parse_impact_input(c.get("impact_input", to_string(p.impact.input)));
  p.impact.hidden = c.get_int("impact_hidden", p.impact.hidden);
  p.impact_train.lr = c.get_double("impact_lr", p.impact_train.lr);
  p.impact_train.patience = c.get_int("impact_patience", p.impact_train.patience);
  p.impact_train.tolerance = c.get_double("impact_tolerance", p.impact_train.tolerance);
  p.impact_train.max_epochs = c.get_int("impact_max_epochs", p.impact_train.max_epochs);

  p.hm_radii = c.get_ints("hm_radii", p.hm_radii);
  p.cm_expand = c.get_ints("cm_expand", p.cm_expand);
  p.delta_points = c.get_int("delta_sweep", p.delta_points);
  p.random_resamples = c.get_int("random_resamples", p.random_resamples);
  p.gamma = c.get_double("gamma", p.gamma);

  const auto unknown = c.unused();
  if (!unknown.empty()) {
    std::string msg = "unknown config key(s):";
    for (const auto& k : unknown) msg += " " + k;
    throw std::invalid_argument(msg);
  }

  p.gen.validate();
  p.backbone.encoder = p.encoder;
  p.tokenizer.encoder = p.encoder;
  p.tokenizer.temp = p.backbone.temp;
  p.tokenizer.sinkhorn_iters = p.backbone.sinkhorn_iters;
  p.impact.d_bits = p.tokenizer.d_bits;
  p.impact.dim_h = p.encoder.dim;
  p.backbone_train.seed = mix_seed(p.seed, 10);
  p.tokenizer_train.seed = mix_seed(p.seed, 11);
  p.impact_train.seed = mix_seed(p.seed, 12);
  if (p.batch_pairs < 1 || p.delta_points < 2 || p.random_resamples < 1) {
    throw std::invalid_argument("batch_pairs >= 1, delta_sweep >= 2 and random_resamples >= 1 required");
  }
  return p;
}

std::string PipelineConfig::canonical() const {
  std::ostringstream o;
  o << std::setprecision(17);
  o << "seed=" << seed << '\n' << "dataset=" << dataset << '\n';
  o << "corpus_size=" << gen.corpus_size << '\n'
    << "num_queries=" << gen.num_queries << '\n'
    << "corpus_nodes=" << gen.corpus_min_nodes << ',' << gen.corpus_max_nodes << '\n'
    << "query_nodes=" << gen.query_min_nodes << ',' << gen.query_max_nodes << '\n'
    << "max_degree=" << gen.max_degree << '\n'
    << "max_extra_edges=" << gen.max_extra_edges << '\n'
    << "edge_delete_fraction=" << gen.edge_delete_fraction << '\n'
    << "positive_fraction=" << gen.positive_fraction_min << ',' << gen.positive_fraction_max << '\n'
    << "max_query_attempts=" << gen.max_query_attempts << '\n';
  o << "layers=" << encoder.layers << '\n' << "dim_h=" << encoder.dim << '\n' << "encoder_hidden=" << encoder.hidden << '\n';
  o << "temp=" << backbone.temp << '\n'
    << "sinkhorn_iters=" << backbone.sinkhorn_iters << '\n'
    << "align=" << backbone.align_hidden << ',' << backbone.align_out << '\n';
  write_rank_config(o, "backbone_", backbone_train);
  o << "d_bits=" << tokenizer.d_bits << '\n'
    << "head_hidden=" << tokenizer.head_hidden << '\n'
    << "mode=" << to_string(tokenizer.mode) << '\n'
    << "distance=" << to_string(tokenizer.distance) << '\n'
    << "batch_pairs=" << batch_pairs << '\n';
  write_rank_config(o, "", tokenizer_train);
  o << "impact_margin=" << join(impact_train.margins) << '\n'
    << "impact_input=" << to_string(impact.input) << '\n'
    << "impact_hidden=" << impact.hidden << '\n'
    << "impact_lr=" << impact_train.lr << '\n'
    << "impact_patience=" << impact_train.patience << '\n'
    << "impact_tolerance=" << impact_train.tolerance << '\n'
    << "impact_max_epochs=" << impact_train.max_epochs << '\n';
  o << "hm_radii=" << join(hm_radii) << '\n'
    << "cm_expand=" << join(cm_expand) << '\n'
    << "delta_sweep=" << delta_points << '\n'
    << "random_resamples=" << random_resamples << '\n'
    << "gamma=" << gamma << '\n';
  return o.str();
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  fs::create_directories(config_.out_dir);
  log_.open(path("run.log"), std::ios::app);
  if (!log_) throw std::runtime_error("cannot open " + path("run.log"));
  const auto canonical = config_.canonical();
  const std::vector<std::uint8_t> cfg(canonical.begin(), canonical.end());
  if (fs::exists(path("bundle.bin"))) {
    bundle_ = Bundle::load(path("bundle.bin"));
    if (bundle_.has("config") && bundle_.get("config") != cfg) {
      throw std::runtime_error(path("bundle.bin") + " was produced with a different configuration");
    }
  }
  if (!bundle_.has("config")) {
    bundle_.put("config", cfg);
    save_bundle();
  }
}

std::string Pipeline::path(const std::string& name) const { return (fs::path(config_.out_dir) / name).string(); }

void Pipeline::log(const std::string& line) {
  log_ << line << '\n';
  log_.flush();
}

void Pipeline::save_bundle() { bundle_.save(path("bundle.bin")); }

template <typename F>
auto Pipeline::stage(const std::string& name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const std::exception& e) {
    log("stage " + name + " failed: " + e.what());
    throw std::runtime_error("stage " + name + " failed: " + e.what());
  }
}

RankTrainConfig Pipeline::with_batch(RankTrainConfig c) const {
  const int train = std::max<int>(1, static_cast<int>(dataset_->split.train.size()));
  c.neg_per_query = std::max(1, config_.batch_pairs / (train * std::max(1, c.pos_per_query)));
  return c;
}

const Dataset& Pipeline::dataset() {
  if (dataset_) return *dataset_;
  return stage("dataset", [&]() -> const Dataset& {
    const std::string manifest = path("data/dataset.json");
    if (fs::exists(manifest)) {
      dataset_ = load_corpus(manifest);
    } else if (!config_.dataset.empty()) {
      dataset_ = load_corpus(config_.dataset);
      if (dataset_->queries.empty()) throw std::runtime_error("dataset " + config_.dataset + " has no queries");
      save_corpus(*dataset_, manifest);
    } else {
      const auto t0 = Clock::now();
      dataset_ = generate_dataset(config_.gen, config_.seed);
      save_corpus(*dataset_, manifest);
      std::ostringstream msg;
      msg << "dataset: generated " << dataset_->corpus.size() << " corpus graphs, " << dataset_->queries.size()
          << " queries, mean positive:negative ratio " << mean_positive_ratio(*dataset_) << " in "
          << seconds_since(t0) << " s";
      log(msg.str());
    }
    return *dataset_;
  });
}

const BackboneParams& Pipeline::backbone() {
  if (backbone_) return *backbone_;
  if (bundle_.has("backbone")) {
    backbone_ = unpack_backbone(bundle_.get("backbone"));
    return *backbone_;
  }
  const Dataset& data = dataset();
  return stage("train-backbone", [&]() -> const BackboneParams& {
    BackboneConfig bc = config_.backbone;
    bc.width = data.width();
    Rng rng(mix_seed(config_.seed, 20));
    BackboneParams params(bc, rng);
    const auto t0 = Clock::now();
    const auto report = train_backbone(params, data, with_batch(config_.backbone_train));
    std::ostringstream msg;
    msg << "train-backbone: " << report.steps << " steps, dev loss " << report.initial_dev_loss << " -> "
        << report.best_dev_loss << " (best step " << report.best_step << "), skipped queries "
        << report.skipped_queries << ", " << seconds_since(t0) << " s";
    log(msg.str());
    bundle_.put("backbone", pack(params));
    save_bundle();
    backbone_ = std::move(params);
    return *backbone_;
  });
}

const TokenizerParams& Pipeline::tokenizer() {
  if (tokenizer_) return *tokenizer_;
  if (bundle_.has("tokenizer")) {
    tokenizer_ = unpack_tokenizer(bundle_.get("tokenizer"));
    return *tokenizer_;
  }
  const Dataset& data = dataset();
  return stage("train-tokenizer", [&]() -> const TokenizerParams& {
    Rng rng(mix_seed(config_.seed, 21));
    TokenizerParams params(config_.tokenizer, rng);
    const auto t0 = Clock::now();
    const auto report = train_tokenizer(params, data, with_batch(config_.tokenizer_train));
    std::ostringstream msg;
    msg << "train-tokenizer: " << report.steps << " steps, dev loss " << report.initial_dev_loss << " -> "
        << report.best_dev_loss << " (best step " << report.best_step << "), skipped queries "
        << report.skipped_queries << ", " << seconds_since(t0) << " s";
    log(msg.str());
    bundle_.put("tokenizer", pack(params));
    save_bundle();
    tokenizer_ = std::move(params);
    return *tokenizer_;
  });
}

std::vector<TokenMultiset> Pipeline::corpus_tokens() {
  const Dataset& data = dataset();
  const TokenizerParams& tok = tokenizer();
  std::vector<TokenMultiset> out(data.corpus.size());
  parallel_for(data.corpus.size(), [&](std::size_t i) { out[i] = tokenize_graph(tok, data.corpus[i], Side::Corpus); });
  return out;
}

const InvertedIndex& Pipeline::index() {
  if (index_) return *index_;
  const std::string file = path("index.bin");
  if (bundle_.has("index_checksum") && fs::exists(file)) {
    auto bytes = read_file(file);
    ByteReader r(bundle_.get("index_checksum"), "index checksum");
    if (fnv1a(bytes) == r.u64()) {
      index_ = InvertedIndex::deserialize(bytes);
      return *index_;
    }
  }
  auto tokens = corpus_tokens();
  return stage("build-index", [&]() -> const InvertedIndex& {
    const auto t0 = Clock::now();
    InvertedIndex idx = InvertedIndex::build(tokenizer().config.d_bits, tokens);
    const double build_s = seconds_since(t0);
    const auto bytes = idx.serialize();
    write_file(file, bytes);
    ByteWriter w;
    w.u64(fnv1a(bytes));
    bundle_.put("index_checksum", w.take());
    save_bundle();
    std::ostringstream msg;
    msg << "build-index: " << idx.corpus_size() << " graphs, " << idx.total_postings() << " postings, build time "
        << build_s << " s, in-memory size " << idx.memory_bytes() << " bytes, file size " << bytes.size() << " bytes";
    log(msg.str());
    index_ = std::move(idx);
    return *index_;
  });
}

const CoocNeighborhoods& Pipeline::cooc() {
  if (!cooc_) cooc_ = std::make_unique<CoocNeighborhoods>(index());
  return *cooc_;
}

QueryArtifacts Pipeline::artifacts(const Graph& q) {
  return query_artifacts(q, tokenizer(), backbone(), config_.impact.input);
}

const ImpactParams& Pipeline::impact(ImpactObjective objective) {
  const bool single = objective == ImpactObjective::SingleProbe;
  auto& slot = single ? impact_single_ : impact_cm_;
  if (slot) return *slot;
  const std::string segment = single ? "impact_single" : "impact_cm";
  if (bundle_.has(segment)) {
    slot = unpack_impact(bundle_.get(segment));
    return *slot;
  }
  const Dataset& data = dataset();
  const InvertedIndex& idx = index();
  const CoocNeighborhoods& neighborhoods = cooc();
  backbone();
  return stage("train-impact", [&]() -> const ImpactParams& {
    std::vector<QueryArtifacts> arts;
    for (const auto* part : {&data.split.train, &data.split.dev}) {
      for (int qid : *part) arts.push_back(artifacts(data.query_graph(qid)));
    }
    ImpactTrainConfig tc = config_.impact_train;
    tc.objective = objective;
    tc.seed = mix_seed(config_.impact_train.seed, single ? 1 : 2);
    Rng rng(mix_seed(config_.seed, 22));
    ImpactParams params(config_.impact, rng);
    const auto t0 = Clock::now();
    const auto report = train_impact(params, data, idx, neighborhoods, arts, tc);
    std::ostringstream msg;
    msg << "train-impact (" << segment << "): margin " << report.margin << ", " << report.epochs << " epochs, dev loss "
        << report.initial_dev_loss << " -> " << report.best_dev_loss << ", dev MAP " << report.dev_map << ", "
        << seconds_since(t0) << " s";
    log(msg.str());
    bundle_.put(segment, pack(params));
    save_bundle();
    slot = std::move(params);
    return *slot;
  });
}

CorpusStats Pipeline::stats() {
  const InvertedIndex& idx = index();
  return stage("stats", [&] {
    CorpusStats st = compute_stats(idx, config_.gamma);
    write_stats_csv(st, config_.out_dir);
    std::ostringstream msg;
    msg << "stats: " << st.tokens.size() << " nonempty tokens, actual rank " << st.actual_rank << ", effective rank "
        << st.effective_rank << " at gamma " << config_.gamma;
    log(msg.str());
    return st;
  });
}

EvalContext Pipeline::eval_context(const std::vector<int>& qids) {
  const Dataset& data = dataset();
  const BackboneParams& bb = backbone();
  EvalContext ctx;
  ctx.data = &data;
  ctx.index = &index();
  ctx.cooc = &cooc();
  ctx.impact_single = &impact(ImpactObjective::SingleProbe);
  ctx.impact_cm = &impact(ImpactObjective::FullCooccurrence);
  const int width = std::max(bb.config.width, data.width());
  std::vector<PreparedGraph> corpus(data.corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) { corpus[i] = prepare(bb, data.corpus[i], width); });
  std::map<int, std::map<int, double>> table;
  for (int qid : qids) {
    const Graph& q = data.query_graph(qid);
    ctx.artifacts.emplace(qid, artifacts(q));
    const PreparedGraph pq = prepare(bb, q, width);
    std::vector<double> d(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t i) { d[i] = align_distance(bb, pq, corpus[i]); });
    auto& row = table[qid];
    for (std::size_t i = 0; i < corpus.size(); ++i) row.emplace(data.corpus[i].id(), d[i]);
  }
  ctx.rerank = table_reranker(std::move(table));
  return ctx;
}

EvalResults Pipeline::evaluate() {
  const Dataset& data = dataset();
  EvalContext ctx = eval_context(data.split.test);
  return stage("evaluate", [&] {
    EvalResults res;
    std::vector<Strategy> strategies;
    for (bool impact : {false, true}) {
      strategies.push_back({ProbeKind::Single, 0, impact});
      for (int r : config_.hm_radii) strategies.push_back({ProbeKind::Hamming, r, impact});
      for (int b : config_.cm_expand) strategies.push_back({ProbeKind::Cooccurrence, b, impact});
    }
    for (const auto& s : strategies) {
      TradeoffReport rep = corgii::evaluate(ctx, s, config_.delta_points);
      write_tradeoff_csv(rep, path("tradeoff_" + rep.strategy + ".csv"));
      int empty = 0;
      for (const auto& row : rep.rows) empty += row.empty_shortlists;
      log("evaluate " + rep.strategy + ": " + std::to_string(rep.rows.size()) + " thresholds, " +
          std::to_string(empty) + " empty shortlists, " + std::to_string(rep.excluded_queries) +
          " queries without positives");
      res.reports.emplace(rep.strategy, std::move(rep));
    }
    const int b = std::find(config_.cm_expand.begin(), config_.cm_expand.end(), 32) != config_.cm_expand.end()
                      ? 32
                      : config_.cm_expand.back();
    res.reference = Strategy{ProbeKind::Cooccurrence, b, true}.name();
    res.random = random_baseline(ctx, res.reports.at(res.reference), config_.random_resamples, mix_seed(config_.seed, 30));
    write_tradeoff_csv(res.random, path("tradeoff_random.csv"));
    log("evaluate random: follows " + res.reference);
    return res;
  });
}

EvalResults Pipeline::run() {
  const auto t0 = Clock::now();
  log("run: seed " + std::to_string(config_.seed));
  dataset();
  backbone();
  tokenizer();
  index();
  impact(ImpactObjective::SingleProbe);
  impact(ImpactObjective::FullCooccurrence);
  stats();
  EvalResults res = evaluate();
  std::ostringstream msg;
  msg << "run: finished in " << seconds_since(t0) << " s";
  log(msg.str());
  return res;
}

}  // namespace corgii
