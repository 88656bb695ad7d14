#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "sta/errors.hpp"
#include "sta/pipeline.hpp"
#include "support.hpp"

using namespace sta;

namespace {

// Writes train/dev/test splits into the temp dir and returns a config that
// points at them. Small budgets keep each pipeline run well under a second.
ExperimentConfig make_config(const sta::test::TempDir& dir, Method method,
                             int beta = 1, int k = 2,
                             std::vector<uint64_t> seeds = {1}) {
  Dataset train = sta::test::tiny_sentiment(5);
  Dataset dev = sta::test::tiny_sentiment(3);
  Dataset test = sta::test::tiny_sentiment(4);
  save_dataset(train, dir.file("train.jsonl"), /*write_sidecar=*/true);
  save_dataset(dev, dir.file("dev.jsonl"), /*write_sidecar=*/true);
  save_dataset(test, dir.file("test.jsonl"), /*write_sidecar=*/true);

  ExperimentConfig cfg;
  cfg.name = "pipeline-test";
  cfg.topic = "sentiment";
  cfg.train_path = dir.file("train.jsonl").string();
  cfg.dev_path = dir.file("dev.jsonl").string();
  cfg.test_path = dir.file("test.jsonl").string();
  cfg.method = method;
  cfg.k_list = {k};
  cfg.seeds = std::move(seeds);
  cfg.aug.beta = beta;
  cfg.aug.decoding.max_new_tokens = 16;
  cfg.out_dir = dir.file("out").string();
  return cfg;
}

std::string bytes(const std::filesystem::path& p) { return read_text_file(p); }

int run_cli(const std::string& args) {
  std::string cmd = std::string(STA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("pipeline is byte-identical across two fresh runs") {
  sta::test::TempDir dir;
  ExperimentConfig cfg = make_config(dir, Method::sta, 2, 2, {1});

  ExperimentConfig first = cfg;
  first.out_dir = dir.file("out_a").string();
  cmd_pipeline(first);

  ExperimentConfig second = cfg;
  second.out_dir = dir.file("out_b").string();
  cmd_pipeline(second);

  for (const char* rel : {"runs/k2_s1/d_star_full.jsonl",
                          "runs/k2_s1/candidates_audit.jsonl",
                          "runs/k2_s1/train_kshot.jsonl", "report.jsonl",
                          "manifest.json"}) {
    CAPTURE(rel);
    CHECK(bytes(dir.file("out_a") / rel) == bytes(dir.file("out_b") / rel));
  }
}

TEST_CASE("augment stage resumes: existing outputs are not regenerated") {
  sta::test::TempDir dir;
  ExperimentConfig cfg = make_config(dir, Method::sta, 1);
  cmd_augment(cfg);

  auto d_star_path = std::filesystem::path(cfg.out_dir) / "runs/k2_s1/d_star_full.jsonl";
  // Replace D* with a recognizable (still valid) dataset; a second augment
  // run must leave it untouched.
  Dataset marker = Dataset::make("marker", "sentiment", {"negative", "positive"},
                                 {{"resume marker text", "positive", ""}});
  save_dataset(marker, d_star_path);
  std::string planted = bytes(d_star_path);
  cmd_augment(cfg);
  CHECK(bytes(d_star_path) == planted);
}

TEST_CASE("method none: empty D* and a report that still evaluates") {
  sta::test::TempDir dir;
  ExperimentConfig cfg = make_config(dir, Method::none);
  cmd_pipeline(cfg);
  auto d_star_path = std::filesystem::path(cfg.out_dir) / "runs/k2_s1/d_star_full.jsonl";
  CHECK(std::filesystem::exists(d_star_path));
  CHECK(read_jsonl(d_star_path).empty());
  RunReport report = load_report(std::filesystem::path(cfg.out_dir) / "report.jsonl");
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].method == "none");
}

TEST_CASE("method eda: beta variants per k-shot example") {
  sta::test::TempDir dir;
  ExperimentConfig cfg = make_config(dir, Method::eda, 3);
  cmd_augment(cfg);
  Dataset d_star = load_dataset(
      std::filesystem::path(cfg.out_dir) / "runs/k2_s1/d_star_full.jsonl",
      cfg.topic);
  // k=2 per class over 2 classes -> 4 originals, beta=3 variants each.
  CHECK(d_star.examples.size() == 12);
}

TEST_CASE("beta_subset: per-class prefix with exact budgets") {
  sta::test::TempDir dir;
  ExperimentConfig cfg = make_config(dir, Method::sta, 3);
  Dataset train = load_dataset(cfg.train_path, cfg.topic);
  Dataset kshot = stage_kshot(cfg, train, 2, 1);
  MockSeq2SeqBackend backend;
  Dataset full = stage_augment(cfg, kshot, 2, 1, backend);
  REQUIRE(full.examples.size() == 3 * 4);  // beta=3, n_y=2 per class

  Dataset one = beta_subset(cfg, kshot, full, 1);
  Dataset two = beta_subset(cfg, kshot, full, 2);
  auto c1 = per_class_counts(one);
  auto c2 = per_class_counts(two);
  CHECK(c1["positive"] == 2);
  CHECK(c1["negative"] == 2);
  CHECK(c2["positive"] == 4);
  CHECK(c2["negative"] == 4);

  // The smaller beta is a per-class prefix of the larger one.
  std::map<std::string, std::vector<std::string>> by_label;
  for (const auto& ex : two.examples) by_label[ex.label].push_back(ex.text);
  std::map<std::string, size_t> seen;
  for (const auto& ex : one.examples) {
    REQUIRE(seen[ex.label] < by_label[ex.label].size());
    CHECK(ex.text == by_label[ex.label][seen[ex.label]++]);
  }
}

TEST_CASE("evaluate without augment outputs is a config error") {
  sta::test::TempDir dir;
  ExperimentConfig cfg = make_config(dir, Method::sta);
  CHECK_THROWS_WITH_AS(cmd_evaluate(cfg), doctest::Contains("missing augmentation"),
                       ConfigError);
}

TEST_CASE("beta grid without a dev set is a config error") {
  sta::test::TempDir dir;
  ExperimentConfig cfg = make_config(dir, Method::sta, 2);
  cfg.dev_path.clear();
  CHECK_THROWS_WITH_AS(cmd_evaluate(cfg), doctest::Contains("dev set required"),
                       ConfigError);
}

TEST_CASE("environment variables fill unset paths") {
  sta::test::TempDir dir;
  ExperimentConfig cfg = make_config(dir, Method::none);
  setenv("STA_OUT", dir.file("env_out").string().c_str(), 1);
  setenv("STA_BACKEND", "mock", 1);
  cfg.apply_environment();
  unsetenv("STA_OUT");
  unsetenv("STA_BACKEND");
  CHECK(cfg.out_dir == dir.file("env_out").string());
  CHECK(cfg.backend_spec == "mock");
}

TEST_CASE("config file round-trip preserves the resolved hash") {
  sta::test::TempDir dir;
  ExperimentConfig cfg = make_config(dir, Method::sta, 2);
  sta::test::write_file(dir.file("config.json"), cfg.to_json().dump(2));
  ExperimentConfig back = ExperimentConfig::from_file(dir.file("config.json"));
  CHECK(back.hash() == cfg.hash());
  CHECK(back.method == Method::sta);
  CHECK(back.aug.beta == 2);
}

TEST_CASE("cli exit codes") {
  sta::test::TempDir dir;
  SUBCASE("no subcommand -> 2") { CHECK(run_cli("") == 2); }
  SUBCASE("unknown subcommand -> 2") { CHECK(run_cli("frobnicate") == 2); }
  SUBCASE("missing config file -> 2") {
    CHECK(run_cli("pipeline --config " + dir.file("absent.json").string()) == 2);
  }
  SUBCASE("nonexistent train path -> 2") {
    ExperimentConfig cfg = make_config(dir, Method::none);
    cfg.train_path = dir.file("no_such.jsonl").string();
    sta::test::write_file(dir.file("config.json"), cfg.to_json().dump(2));
    CHECK(run_cli("pipeline --config " + dir.file("config.json").string()) == 2);
  }
  SUBCASE("well-formed pipeline -> 0 with report on disk") {
    ExperimentConfig cfg = make_config(dir, Method::sta, 1);
    sta::test::write_file(dir.file("config.json"), cfg.to_json().dump(2));
    CHECK(run_cli("pipeline --config " + dir.file("config.json").string()) == 0);
    CHECK(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / "report.txt"));
  }
}
