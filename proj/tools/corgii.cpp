#include <algorithm>
#include <cstdio>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corgii/evaluate.hpp"
#include "corgii/lexicon.hpp"
#include "corgii/pipeline.hpp"

namespace {

using namespace corgii;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

Pipeline open(const Common& c) {
  Config cfg = c.config.empty() ? Config{} : Config::load(c.config);
  if (!c.out_dir.empty()) cfg.set("out_dir", c.out_dir);
  return Pipeline(PipelineConfig::from(cfg, c.seed));
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key=value configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "overrides the configured seed");
  app->add_option("--out", c.out_dir, "overrides out_dir");
}

void print_report(const TradeoffReport& r) {
  std::cout << r.strategy << " (" << r.excluded_queries << " queries without positives excluded)\n";
  std::cout << "  delta         kC        map       ms/query  empty\n";
  for (const auto& row : r.rows) {
    std::printf("  %-12.6g  %-8.4f  %-8.4f  %-8.3f  %d\n", row.delta, row.kc, row.map, row.ms_per_query,
                row.empty_shortlists);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subgraph retrieval with learned graph tokens and an inverted index"};
  app.require_subcommand(1);

  Common common;
  auto* gen = app.add_subcommand("gen", "generate or load the dataset");
  auto* backbone = app.add_subcommand("train-backbone", "train the alignment reranker");
  auto* tokenizer = app.add_subcommand("train-tokenizer", "train the node tokenizer");
  auto* build = app.add_subcommand("build-index", "tokenize the corpus and write index.bin");
  auto* impact = app.add_subcommand("train-impact", "train both impact networks");
  auto* query = app.add_subcommand("query", "score one query and print the reranked shortlist");
  auto* evaluate = app.add_subcommand("evaluate", "sweep thresholds and write trade-off CSVs");
  auto* stats = app.add_subcommand("stats", "write posting statistics CSVs");
  auto* run = app.add_subcommand("run", "run every stage");
  for (auto* sub : {gen, backbone, tokenizer, build, impact, query, evaluate, stats, run}) add_common(sub, common);

  std::string kind = "cm", weights = "impact";
  int radius = 1, expand = 32, delta_sweep = 0, qid = -1, top = 10;
  double delta = 0.0;
  for (auto* sub : {query, evaluate}) {
    sub->add_option("--strategy", kind, "single|hm|cm")->check(CLI::IsMember({"single", "hm", "cm"}));
    sub->add_option("--weights", weights, "unif|impact")->check(CLI::IsMember({"unif", "impact"}));
    sub->add_option("--radius", radius, "Hamming radius for hm")->check(CLI::NonNegativeNumber);
    sub->add_option("--expand", expand, "neighbors per token for cm")->check(CLI::PositiveNumber);
  }
  evaluate->add_option("--delta-sweep", delta_sweep, "thresholds per curve (default from config)");
  bool all = false;
  evaluate->add_flag("--all", all, "every configured strategy plus the random baseline");
  query->add_option("--qid", qid, "query ID (default: first test query)");
  query->add_option("--delta", delta, "score threshold for the shortlist");
  query->add_option("--top", top, "shortlist entries to print")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    Pipeline p = open(common);
    if (gen->parsed()) {
      const auto& d = p.dataset();
      std::cout << d.corpus.size() << " corpus graphs, " << d.queries.size() << " queries, width " << d.width()
                << ", mean positive:negative ratio " << mean_positive_ratio(d) << "\n";
    } else if (backbone->parsed()) {
      p.backbone();
    } else if (tokenizer->parsed()) {
      p.tokenizer();
    } else if (build->parsed()) {
      const auto& idx = p.index();
      std::cout << idx.vocabulary() << " tokens, " << idx.total_postings() << " postings\n";
    } else if (impact->parsed()) {
      p.impact(ImpactObjective::SingleProbe);
      p.impact(ImpactObjective::FullCooccurrence);
    } else if (stats->parsed()) {
      const auto st = p.stats();
      std::cout << "actual rank " << st.actual_rank << ", effective rank " << st.effective_rank << "\n";
    } else if (run->parsed()) {
      const auto res = p.run();
      for (const auto& [name, rep] : res.reports) print_report(rep);
      print_report(res.random);
    } else if (evaluate->parsed()) {
      if (all) {
        const auto res = p.evaluate();
        for (const auto& [name, rep] : res.reports) print_report(rep);
        print_report(res.random);
      } else {
        const Strategy s = parse_strategy(kind, weights, radius, expand);
        EvalContext ctx = p.eval_context(p.dataset().split.test);
        const int points = delta_sweep > 0 ? delta_sweep : p.config().delta_points;
        const auto rep = corgii::evaluate(ctx, s, points);
        write_tradeoff_csv(rep, p.path("tradeoff_" + rep.strategy + ".csv"));
        print_report(rep);
      }
    } else if (query->parsed()) {
      const Dataset& data = p.dataset();
      if (qid < 0) {
        if (data.split.test.empty()) throw std::runtime_error("dataset has no test queries");
        qid = data.split.test.front();
      }
      const Strategy s = parse_strategy(kind, weights, radius, expand);
      EvalContext ctx = p.eval_context({qid});
      const QueryArtifacts& art = ctx.artifacts.at(qid);
      std::cout << "query ";
      dump_tokens(std::cout, art.multiset());
      const ScoreMap scores = strategy_scores(ctx, s, art);
      const CandidateSet cand = shortlist(qid, scores, delta);
      const auto ranked = ctx.rerank(qid, cand.ids);
      std::cout << s.name() << ": " << cand.ids.size() << " of " << data.corpus.size() << " graphs above delta "
                << delta << "\n";
      for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < top; ++i) {
        const int cid = ranked[i];
        std::cout << "  " << i + 1 << ". graph " << cid << " score " << scores.at(cid)
                  << (data.is_relevant(qid, cid) ? " relevant" : "") << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
