#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sta/errors.hpp"
#include "sta/mock_backend.hpp"
#include "sta/sta_core.hpp"
#include "support.hpp"

using namespace sta;
using sta::test::ScriptedBackend;

namespace {

AugmentationConfig base_config(int beta = 1, uint64_t seed = 0) {
  AugmentationConfig cfg;
  cfg.beta = beta;
  cfg.seed = seed;
  cfg.decoding.max_new_tokens = 16;
  return cfg;
}

}  // namespace

TEST_CASE("softmax examples") {
  SUBCASE("equal scores split evenly") {
    auto q = softmax({-2.0, -2.0});
    CHECK(q[0] == doctest::Approx(0.5));
    CHECK(q[1] == doctest::Approx(0.5));
  }
  SUBCASE("u = (0, ln 3) gives q = (0.25, 0.75)") {
    auto q = softmax({0.0, std::log(3.0)});
    CHECK(q[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("additive shift leaves q unchanged") {
    auto q1 = softmax({0.3, -1.2, 2.0});
    auto q2 = softmax({0.3 + 17.5, -1.2 + 17.5, 2.0 + 17.5});
    for (size_t i = 0; i < q1.size(); ++i) {
      CHECK(q1[i] == doctest::Approx(q2[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("self_check_scores uses the c1 source and softmax-normalizes") {
  ScriptedBackend backend;
  Dataset d = sta::test::tiny_sentiment(2);
  const std::string source =
      "Given sentiment: negative, positive. Classify: some generated text";
  backend.script_score(source, "negative", {0.0});
  backend.script_score(source, "positive", {std::log(3.0)});
  auto scores = self_check_scores(backend, "h", "some generated text", d);
  CHECK(scores.at("negative").second == doctest::Approx(0.25));
  CHECK(scores.at("positive").second == doctest::Approx(0.75));
  CHECK(scores.at("positive").first == doctest::Approx(std::log(3.0)));
  double sum = scores.at("negative").second + scores.at("positive").second;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("select_top picks the highest q") {
  CandidatePool pool;
  pool.label = "pos";
  double qs[] = {0.9, 0.1, 0.8, 0.7, 0.2};
  for (size_t i = 0; i < 5; ++i) {
    ScoredCandidate c;
    c.text = "t" + std::to_string(i);
    c.label = "pos";
    c.q = qs[i];
    c.u = std::log(qs[i]);
    c.gen_index = i;
    pool.candidates.push_back(c);
  }
  auto top = select_top(pool, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].q == 0.9);
  CHECK(top[1].q == 0.8);
}

TEST_CASE("select_top tie-break: generation order") {
  CandidatePool pool;
  pool.label = "pos";
  for (size_t i = 0; i < 6; ++i) {
    ScoredCandidate c;
    c.q = 0.5;
    c.u = -1.0;
    c.gen_index = i;
    pool.candidates.push_back(c);
  }
  auto top = select_top(pool, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0].gen_index == 0);
  CHECK(top[1].gen_index == 1);
  CHECK(top[2].gen_index == 2);
}

TEST_CASE("select_top returns a short pool in full") {
  CandidatePool pool;
  pool.label = "pos";
  for (size_t i = 0; i < 5; ++i) {
    ScoredCandidate c;
    c.q = 0.1 * static_cast<double>(i);
    c.gen_index = i;
    pool.candidates.push_back(c);
  }
  CHECK(select_top(pool, 10).size() == 5);
}

TEST_CASE("selection oracle: stable sort by (q, u, index)") {
  Rng rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    CandidatePool pool;
    pool.label = "y";
    size_t n = 1 + rng.below(400);
    for (size_t i = 0; i < n; ++i) {
      ScoredCandidate c;
      c.q = static_cast<double>(rng.below(20)) / 20.0;  // force ties
      c.u = static_cast<double>(rng.below(10)) * -0.5;
      c.gen_index = i;
      c.text = "t" + std::to_string(i);
      pool.candidates.push_back(c);
    }
    size_t keep = 1 + rng.below(n);

    std::vector<ScoredCandidate> oracle = pool.candidates;
    std::stable_sort(oracle.begin(), oracle.end(),
                     [](const ScoredCandidate& a, const ScoredCandidate& b) {
                       if (a.q != b.q) return a.q > b.q;
                       if (a.u != b.u) return a.u > b.u;
                       return a.gen_index < b.gen_index;
                     });
    oracle.resize(keep);

    auto got = select_top(pool, keep);
    REQUIRE(got.size() == oracle.size());
    for (size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].gen_index == oracle[i].gen_index);
    }
  }
}

TEST_CASE("run_sta budget: alpha candidates in, beta*n_y out") {
  Dataset d = sta::test::tiny_sentiment(10);  // n_y = 10 per class
  MockSeq2SeqBackend backend;
  AugmentationConfig cfg = base_config(2, 7);
  StaRunResult result = run_sta(d, cfg, backend);
  // 5*2*10 = 100 candidates per class, 2*10 = 20 selected per class
  CHECK(result.realized_alpha.at("positive") == 100);
  CHECK(result.realized_alpha.at("negative") == 100);
  CHECK(result.augmented.examples.size() == 40);
  auto counts = per_class_counts(result.augmented);
  CHECK(counts["positive"] == 20);
  CHECK(counts["negative"] == 20);
}

TEST_CASE("run_sta rejects beta = 0") {
  AugmentationConfig cfg = base_config(0);
  MockSeq2SeqBackend backend;
  Dataset d = sta::test::tiny_sentiment(2);
  CHECK_THROWS_AS(run_sta(d, cfg, backend), ConfigError);
}

TEST_CASE("self_check off: ablation keeps a uniform sample and never scores") {
  Dataset d = sta::test::tiny_sentiment(5);
  MockSeq2SeqBackend backend;
  AugmentationConfig cfg = base_config(1, 3);
  cfg.self_check = false;
  StaRunResult result = run_sta(d, cfg, backend);
  CHECK(result.realized_alpha.at("positive") == 25);
  CHECK(per_class_counts(result.augmented)["positive"] == 5);
  CHECK(backend.stats().score_calls == 0);
}

TEST_CASE("self_check on calls score_target; ablation observability") {
  Dataset d = sta::test::tiny_sentiment(2);
  MockSeq2SeqBackend backend;
  AugmentationConfig cfg = base_config(1, 3);
  StaRunResult result = run_sta(d, cfg, backend);
  // 2 classes * alpha(5)*n_y(2) candidates * 2 labels scored each
  CHECK(backend.stats().score_calls == 2 * 10 * 2);
  (void)result;
}

TEST_CASE("generate_candidates uses the g1 prefix for the class") {
  Dataset d = sta::test::tiny_sentiment(2);
  ScriptedBackend backend;
  backend.script_generations({"generated text sample"}, /*cycle=*/true);
  AugmentationConfig cfg = base_config(1, 0);
  CandidatePool pool = generate_candidates(backend, "h", d, "positive", cfg);
  CHECK(pool.candidates.size() == 10);
  REQUIRE(backend.prefixes.size() == 1);
  CHECK(backend.prefixes[0] == "Description: positive sentiment. Text:");
}

TEST_CASE("blank generations consume retries; pool still full") {
  Dataset d = sta::test::tiny_sentiment(1);  // n_y = 1, alpha = 5
  ScriptedBackend backend;
  backend.script_generations(
      {"one good text", "  ", "two good text", "three good text", "four good text",
       "five good text", "six good text"});
  AugmentationConfig cfg = base_config(1, 0);
  CandidatePool pool = generate_candidates(backend, "h", d, "positive", cfg);
  CHECK(pool.candidates.size() == 5);
  CHECK(backend.generate_calls == 2);  // initial batch + one retry
}

TEST_CASE("retry budget exhaustion leaves a short pool with a warning") {
  Dataset d = sta::test::tiny_sentiment(1);
  ScriptedBackend backend;
  backend.script_generations({" "}, /*cycle=*/true);  // only blanks, ever
  AugmentationConfig cfg = base_config(1, 0);
  std::vector<std::string> warnings;
  CandidatePool pool = generate_candidates(backend, "h", d, "positive", cfg, &warnings);
  CHECK(pool.candidates.empty());
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("after retries") != std::string::npos);
}

TEST_CASE("label purity: every generated example carries its source class") {
  Dataset d = sta::test::tiny_sentiment(3);
  MockSeq2SeqBackend backend;
  StaRunResult result = run_sta(d, base_config(2, 5), backend);
  for (const auto& c : result.audit) {
    CHECK((c.label == "positive" || c.label == "negative"));
  }
  for (const auto& ex : result.augmented.examples) {
    CHECK(ex.provenance == "generated");
  }
}

TEST_CASE("run_sta is deterministic with the mock backend") {
  Dataset d = sta::test::tiny_sentiment(3);
  AugmentationConfig cfg = base_config(1, 9);
  MockSeq2SeqBackend b1, b2;
  StaRunResult r1 = run_sta(d, cfg, b1);
  StaRunResult r2 = run_sta(d, cfg, b2);
  REQUIRE(r1.augmented.examples.size() == r2.augmented.examples.size());
  for (size_t i = 0; i < r1.augmented.examples.size(); ++i) {
    CHECK(r1.augmented.examples[i].text == r2.augmented.examples[i].text);
  }
  REQUIRE(r1.audit.size() == r2.audit.size());
  for (size_t i = 0; i < r1.audit.size(); ++i) {
    CHECK(r1.audit[i].text == r2.audit[i].text);
    CHECK(r1.audit[i].q == r2.audit[i].q);
    CHECK(r1.audit[i].selected == r2.audit[i].selected);
  }
}

TEST_CASE("q vectors in the audit sum to 1") {
  Dataset d = sta::test::tiny_sentiment(2);
  MockSeq2SeqBackend backend;
  StaRunResult result = run_sta(d, base_config(1, 2), backend);
  for (const auto& c : result.audit) {
    double sum = 0.0;
    for (double q : c.q_vector) {
      CHECK(q > 0.0);
      CHECK(q < 1.0);
      sum += q;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("two-prompt family emits only c1 and g1 pairs") {
  Dataset d = sta::test::tiny_sentiment(3);
  MockSeq2SeqBackend backend;
  AugmentationConfig cfg = base_config(1, 1);
  cfg.family = TemplateFamily::two_prompt();
  StaRunResult result = run_sta(d, cfg, backend);
  CHECK(!result.conversion.pairs.empty());
  for (const auto& p : result.conversion.pairs) {
    CHECK((p.template_id == TemplateId::c1 || p.template_id == TemplateId::g1));
  }
}
