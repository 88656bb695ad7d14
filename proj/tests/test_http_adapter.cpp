#include <doctest.h>

#include "sta/http_adapter.hpp"
#include "sta/mock_backend.hpp"
#include "sta/templates.hpp"
#include "support.hpp"

using namespace sta;

namespace {

struct Fixture {
  MockSeq2SeqBackend backend;
  MockClassifier classifier;
  AdapterServer server{backend, classifier};
  int port = 0;
  Fixture() { port = server.start(); }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

}  // namespace

TEST_CASE("adapter round-trip: finetune, generate, score") {
  Fixture fx;
  HttpSeq2SeqBackend remote(fx.url());

  Dataset d = sta::test::tiny_sentiment(3);
  ConvertResult conv = convert(d, TemplateFamily::full(), 0);
  FineTuneParams params;
  std::string handle = remote.fine_tune(conv.pairs, params);
  CHECK(handle.rfind("mock-", 0) == 0);

  // the remote handle matches a direct in-process fine-tune
  MockSeq2SeqBackend local;
  CHECK(handle == local.fine_tune(conv.pairs, params));

  DecodingParams dec;
  dec.seed = 3;
  auto remote_texts = remote.generate(handle, "Description: positive sentiment. Text:", dec, 4);
  CHECK(remote_texts.size() == 4);
  auto local_texts = local.generate(handle, "Description: positive sentiment. Text:", dec, 4);
  CHECK(remote_texts == local_texts);

  double remote_score = remote.score_target(handle, "Classify: a fine film", "positive");
  double local_score = local.score_target(handle, "Classify: a fine film", "positive");
  CHECK(remote_score == doctest::Approx(local_score).epsilon(1e-12));
}

TEST_CASE("adapter round-trip: classifier train and classify") {
  Fixture fx;
  HttpClassifier remote(fx.url());
  Dataset d = sta::test::tiny_sentiment(3);
  std::string handle = remote.train(d, FineTuneParams{});
  auto labels = remote.predict(handle, {d.examples[0].text, "unseen text"});
  REQUIRE(labels.size() == 2);
  CHECK(labels[0] == d.examples[0].label);
  CHECK((labels[1] == "negative" || labels[1] == "positive"));
}

TEST_CASE("adapter surfaces remote failures") {
  Fixture fx;
  HttpSeq2SeqBackend remote(fx.url());
  CHECK_THROWS(remote.generate("no-such-handle", "prefix", DecodingParams{}, 2));
  CHECK_THROWS(remote.score_target("no-such-handle", "s", "t"));
}
