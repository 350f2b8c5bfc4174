#include <doctest.h>

#include <filesystem>

#include "corgii/pipeline.hpp"
#include "test_util.hpp"

using namespace corgii;
namespace fs = std::filesystem;

namespace {

Config tiny_config(const std::string& out_dir) {
  return Config::parse("out_dir = " + out_dir +
                       "\n"
                       "corpus_size = 40\n"
                       "num_queries = 8\n"
                       "positive_fraction_min = 0.0\n"
                       "positive_fraction_max = 1.0\n"
                       "backbone_max_steps = 2\n"
                       "max_steps = 2\n"
                       "batch_pairs = 40\n"
                       "impact_margin = 0.1\n"
                       "impact_max_epochs = 2\n"
                       "delta_sweep = 5\n"
                       "random_resamples = 2\n");
}

std::string fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("pipeline config rejects unknown keys and honors the seed override") {
  CHECK_THROWS_WITH_AS(PipelineConfig::from(Config::parse("marign = 1\n")), doctest::Contains("marign"),
                       std::exception);
  const auto pc = PipelineConfig::from(Config::parse("seed = 5\n"), 9);
  CHECK(pc.seed == 9);
  CHECK(PipelineConfig::from(Config::parse("seed = 5\n")).canonical() !=
        PipelineConfig::from(Config::parse("seed = 6\n")).canonical());
}

TEST_CASE("tiny pipeline runs end to end and reloads its artifacts") {
  const auto dir = fresh_dir("corgii_tiny_pipeline");
  const auto cfg = PipelineConfig::from(tiny_config(dir));
  EvalResults first;
  std::vector<std::uint8_t> index_bytes;
  {
    Pipeline p(cfg);
    first = p.run();
    index_bytes = p.index().serialize();
  }
  for (const char* f : {"bundle.bin", "index.bin", "run.log", "tradeoff_cm32_impact.csv", "tradeoff_random.csv"})
    CHECK(fs::exists(fs::path(dir) / f));
  CHECK(first.reports.size() == 10);
  CHECK(first.reference == "cm32_impact");

  Pipeline again(cfg);
  CHECK(again.index().serialize() == index_bytes);
  const auto second = again.evaluate();
  for (const auto& [name, rep] : first.reports) {
    const auto& other = second.reports.at(name);
    REQUIRE(rep.rows.size() == other.rows.size());
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      CHECK(rep.rows[i].delta == other.rows[i].delta);
      CHECK(rep.rows[i].map == other.rows[i].map);
    }
  }

  auto changed = tiny_config(dir);
  changed.set("margin", "3");
  CHECK_THROWS_WITH_AS(Pipeline(PipelineConfig::from(changed)), doctest::Contains("different configuration"),
                       std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("impact weights: zero output layer and oracle agreement") {
  Rng rng(60);
  ImpactParams p(ImpactConfig{}, rng);
  const auto h = corgii::testing::random_tensor(rng, 4, 10);
  const std::vector<Token> tokens{3, 1000, 3, 511};
  const auto feats = impact_features(tokens, {0, 1, 2, 3}, h, 10);
  const auto w = impact_weights(p, feats);
  for (int r = 0; r < 4; ++r) {
    CHECK(w[r] == doctest::Approx(corgii::testing::impact_oracle(p.mlp, tokens[r], 10, h, r)).epsilon(1e-12));
    CHECK(impact_weight(p, tokens[r], std::span<const double>(h.data() + r * 10, 10)) == doctest::Approx(w[r]).epsilon(1e-12));
  }
  for (double& v : p.mlp.second.w.values()) v = 0.0;
  for (double& v : p.mlp.second.b.values()) v = 0.0;
  for (double v : impact_weights(p, feats)) CHECK(v == 0.0);
}
