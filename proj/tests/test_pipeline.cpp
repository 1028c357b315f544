#include <doctest.h>

#include "mekbrec/error.hpp"
#include "mekbrec/pipeline.hpp"
#include "support.hpp"

using namespace mekb;

TEST_CASE("pipeline config round-trips through JSON losslessly") {
  PipelineConfig cfg;
  cfg.work_dir = "/tmp/somewhere";
  cfg.train.lr = 0.1 + 0.2;  // not exactly representable in short decimal
  cfg.encoder.mlp_hidden = 7;
  cfg.train.optimizer = OptimizerKind::adam;
  cfg.synth.separable = true;
  cfg.files.model = "m.bin";
  cfg.set_seed(123);
  const PipelineConfig back = pipeline_config_from_json(pipeline_config_to_json(cfg));
  CHECK(back == cfg);

  const auto dir = testsupport::scratch("config");
  save_pipeline_config(cfg, (dir / "c.json").string());
  CHECK(load_pipeline_config((dir / "c.json").string()) == cfg);
}

TEST_CASE("partial configs fall back to defaults") {
  const PipelineConfig cfg = pipeline_config_from_json(R"({"work_dir": "w", "train": {"epochs": 2}})");
  CHECK(cfg.work_dir == "w");
  CHECK(cfg.train.epochs == 2);
  CHECK(cfg.train.batch_size == PipelineConfig{}.train.batch_size);
  CHECK_THROWS_AS(pipeline_config_from_json("{not json"), ParseError);
}

TEST_CASE("seed override changes every derived seed") {
  PipelineConfig a, b;
  b.set_seed(8);
  CHECK(a.synth.seed != b.synth.seed);
  CHECK(a.encoder.seed != b.encoder.seed);
  CHECK(a.train.seed != b.train.seed);
  CHECK(a.split.seed != b.split.seed);
  CHECK(a.eval.seed != b.eval.seed);
}

TEST_CASE("a seed in a config file rederives stage seeds unless they are given") {
  PipelineConfig want;
  want.set_seed(9);
  const PipelineConfig a = pipeline_config_from_json(R"({"seed": 9})");
  CHECK(a == want);
  const PipelineConfig b = pipeline_config_from_json(R"({"seed": 9, "eval": {"seed": 1}})");
  CHECK(b.eval.seed == 1);
  CHECK(b.train.seed == want.train.seed);
}

TEST_CASE("stages report missing inputs") {
  PipelineConfig cfg;
  cfg.work_dir = testsupport::scratch("missing").string();
  CHECK_THROWS_AS(run_build_alias(cfg), InputError);
  CHECK_THROWS_AS(run_link(cfg), InputError);
  CHECK_THROWS_AS(run_train(cfg), InputError);
  CHECK_THROWS_AS(run_evaluate(cfg), InputError);
}

TEST_CASE("small end-to-end run and retrieval") {
  PipelineConfig cfg;
  cfg.work_dir = testsupport::scratch("pipeline_small").string();
  cfg.synth.n_users = 60;
  cfg.synth.n_source_items = 36;
  cfg.synth.n_target_items = 24;
  cfg.synth.n_topics = 4;
  cfg.synth.n_entities = 40;
  cfg.synth.n_cooccurrence = 40;
  cfg.vocab_size = 200;
  cfg.encoder.d_model = 8;
  cfg.encoder.n_heads = 2;
  cfg.encoder.d_ffn = 16;
  cfg.encoder.k_dim = 4;
  cfg.encoder.n_max = 32;
  cfg.pretrain.epochs = 2;
  cfg.train.epochs = 2;
  cfg.eval.n_neg = 10;
  run_all(cfg);
  const auto report = testsupport::read_file(cfg.path(cfg.files.report));
  CHECK(report.find("zero-shot [0]") != std::string::npos);
  CHECK(report.find("popularity") != std::string::npos);
  CHECK(testsupport::read_file(cfg.path(cfg.files.report_jsonl)).find("\"ranker\":\"model\"") !=
        std::string::npos);

  const auto top = run_retrieve(cfg, "u00001", 5);
  REQUIRE(top.size() == 5);
  for (std::size_t i = 1; i < top.size(); ++i) {
    CHECK((top[i - 1].second > top[i].second ||
           (top[i - 1].second == top[i].second && top[i - 1].first < top[i].first)));
  }
  CHECK_THROWS_AS(run_retrieve(cfg, "nobody", 5), ColdUserError);
}
