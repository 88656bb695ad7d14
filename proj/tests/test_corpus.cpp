#include <doctest.h>

#include <set>

#include "sta/corpus.hpp"
#include "sta/errors.hpp"
#include "sta/rng.hpp"
#include "support.hpp"

using namespace sta;
using test::TempDir;
using test::write_file;

TEST_CASE("load_dataset reads text/label records and sorts the inventory") {
  TempDir dir;
  write_file(dir.file("d.jsonl"),
             R"({"text":"a","label":"pos"})" "\n" R"({"text":"b","label":"neg"})" "\n");
  Dataset d = load_dataset(dir.file("d.jsonl"), "sentiment");
  CHECK(d.examples.size() == 2);
  CHECK(d.labels == std::vector<std::string>{"neg", "pos"});
  CHECK(d.topic == "sentiment");
  CHECK(d.examples[0].text == "a");
  CHECK(d.examples[1].label == "neg");
}

TEST_CASE("load_dataset rejects an empty file") {
  TempDir dir;
  write_file(dir.file("empty.jsonl"), "");
  CHECK_THROWS_WITH_AS(load_dataset(dir.file("empty.jsonl")),
                       doctest::Contains("empty dataset"), ConfigError);
}

TEST_CASE("load_dataset names the offending line") {
  TempDir dir;
  write_file(dir.file("bad.jsonl"),
             R"({"text":"a","label":"pos"})" "\n" R"({"text":"b"})" "\n");
  CHECK_THROWS_WITH_AS(load_dataset(dir.file("bad.jsonl")),
                       doctest::Contains(":2:"), ConfigError);
}

TEST_CASE("load_dataset enforces a supplied inventory") {
  TempDir dir;
  write_file(dir.file("d.jsonl"), R"({"text":"a","label":"joy"})" "\n");
  write_file(dir.file("d.jsonl.meta.json"),
             R"({"name":"x","topic":"emotion","labels":["anger","fear"]})");
  CHECK_THROWS_WITH_AS(load_dataset(dir.file("d.jsonl")),
                       doctest::Contains("outside the supplied inventory"),
                       ConfigError);
}

TEST_CASE("sidecar metadata supplies name, topic, order and verbalizations") {
  TempDir dir;
  write_file(dir.file("d.jsonl"), R"({"text":"a","label":"pos"})" "\n");
  write_file(dir.file("d.jsonl.meta.json"),
             R"({"name":"reviews","topic":"sentiment","labels":["pos","neg"],)"
             R"("verbalizations":{"pos":"positive","neg":"negative"}})");
  Dataset d = load_dataset(dir.file("d.jsonl"));
  CHECK(d.name == "reviews");
  CHECK(d.labels == std::vector<std::string>{"pos", "neg"});
  CHECK(d.verbalize("pos") == "positive");
}

TEST_CASE("save then load is identity on texts, labels and order") {
  TempDir dir;
  Dataset d = test::tiny_sentiment(4);
  save_dataset(d, dir.file("out.jsonl"), true);
  Dataset back = load_dataset(dir.file("out.jsonl"));
  REQUIRE(back.examples.size() == d.examples.size());
  for (size_t i = 0; i < d.examples.size(); ++i) {
    CHECK(back.examples[i].text == d.examples[i].text);
    CHECK(back.examples[i].label == d.examples[i].label);
  }
  CHECK(back.labels == d.labels);
  CHECK(back.topic == d.topic);
}

TEST_CASE("sample_k_shot draws exactly k per class, deterministically") {
  Dataset d = test::tiny_sentiment(100);
  Dataset a = sample_k_shot(d, {5, 7});
  Dataset b = sample_k_shot(d, {5, 7});
  auto counts = per_class_counts(a);
  CHECK(counts["positive"] == 5);
  CHECK(counts["negative"] == 5);
  REQUIRE(a.examples.size() == b.examples.size());
  for (size_t i = 0; i < a.examples.size(); ++i) {
    CHECK(a.examples[i].text == b.examples[i].text);
    CHECK(a.examples[i].label == b.examples[i].label);
  }
}

TEST_CASE("sample_k_shot is a sub-multiset of the source") {
  Dataset d = test::tiny_sentiment(20);
  Dataset s = sample_k_shot(d, {7, 123});
  std::multiset<std::string> source, sampled;
  for (const auto& ex : d.examples) source.insert(ex.text + "|" + ex.label);
  for (const auto& ex : s.examples) sampled.insert(ex.text + "|" + ex.label);
  for (const auto& item : sampled) {
    CHECK(sampled.count(item) <= source.count(item));
  }
}

TEST_CASE("sample_k_shot errors when a class is too small, naming it") {
  Dataset d = Dataset::make("t", "sentiment", {"neg", "pos"},
                            {{"one positive text", "pos", ""},
                             {"first negative text", "neg", ""},
                             {"second negative text", "neg", ""}});
  CHECK_THROWS_WITH_AS(sample_k_shot(d, {2, 0}), doctest::Contains("'pos'"),
                       ConfigError);
}

TEST_CASE("k equal to class size returns the class in full") {
  Dataset d = test::tiny_sentiment(3);
  Dataset s = sample_k_shot(d, {3, 42});
  CHECK(per_class_counts(s)["positive"] == 3);
  CHECK(s.examples.size() == d.examples.size());
}

TEST_CASE("per-class draws are keyed by label: adding a class is stable") {
  Dataset two = test::tiny_sentiment(10);
  std::vector<LabeledExample> with_extra = two.examples;
  for (int i = 0; i < 10; ++i) {
    with_extra.push_back({"neutral text number " + std::to_string(i), "neutral", ""});
  }
  Dataset three = Dataset::make("t", "sentiment",
                                {"negative", "positive", "neutral"}, with_extra);
  Dataset a = sample_k_shot(two, {4, 9});
  Dataset b = sample_k_shot(three, {4, 9});
  std::vector<std::string> a_pos, b_pos;
  for (const auto& ex : a.examples) if (ex.label == "positive") a_pos.push_back(ex.text);
  for (const auto& ex : b.examples) if (ex.label == "positive") b_pos.push_back(ex.text);
  CHECK(a_pos == b_pos);
}

TEST_CASE("per_class_counts") {
  Dataset d = Dataset::make("t", "sentiment", {"neg", "pos"},
                            {{"p one", "pos", ""},
                             {"p two", "pos", ""},
                             {"p three", "pos", ""},
                             {"n one", "neg", ""},
                             {"n two", "neg", ""}});
  auto counts = per_class_counts(d);
  CHECK(counts["pos"] == 3);
  CHECK(counts["neg"] == 2);

  Dataset empty = Dataset::make("t", "sentiment", {"neg", "pos"}, {});
  auto zero = per_class_counts(empty);
  CHECK(zero["pos"] == 0);
  CHECK(zero["neg"] == 0);

  auto after = per_class_counts(sample_k_shot(test::tiny_sentiment(10), {10, 3}));
  CHECK(after["positive"] == 10);
  CHECK(after["negative"] == 10);
}

TEST_CASE("dataset invariants are validated") {
  CHECK_THROWS_AS(Dataset::make("t", "s", {}, {}), ConfigError);
  CHECK_THROWS_AS(Dataset::make("t", "s", {"a", "a"}, {}), ConfigError);
  CHECK_THROWS_AS(Dataset::make("t", "s", {"a"}, {{"  ", "a", ""}}), ConfigError);
  CHECK_THROWS_AS(Dataset::make("t", "s", {"a"}, {{"text", "b", ""}}), ConfigError);
}
