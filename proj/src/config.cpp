#include "sta/config.hpp"

#include <cstdio>
#include <cstdlib>

#include "sta/errors.hpp"

namespace sta {

std::string to_string(Method m) {
  switch (m) {
    case Method::sta: return "sta";
    case Method::sta_noself: return "sta-noself";
    case Method::sta_twoprompts: return "sta-twoprompts";
    case Method::eda: return "eda";
    case Method::none: return "none";
    case Method::external: return "external";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "sta") return Method::sta;
  if (s == "sta-noself") return Method::sta_noself;
  if (s == "sta-twoprompts") return Method::sta_twoprompts;
  if (s == "eda") return Method::eda;
  if (s == "none") return Method::none;
  if (s == "external") return Method::external;
  throw ConfigError("unknown method '" + s + "'");
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) {
    throw ConfigError("malformed config file: " + path.string());
  }
  return from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  c.name = j.value("name", c.name);
  c.train_path = j.value("train", c.train_path);
  c.dev_path = j.value("dev", c.dev_path);
  c.test_path = j.value("test", c.test_path);
  c.topic = j.value("topic", c.topic);
  if (j.contains("method")) c.method = method_from_string(j["method"].get<std::string>());
  if (j.contains("k")) c.k_list = j["k"].get<std::vector<int>>();
  if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<uint64_t>>();

  if (j.contains("augmentation")) {
    const json& a = j["augmentation"];
    c.aug.beta = a.value("beta", c.aug.beta);
    c.aug.alpha_multiplier = a.value("alpha_multiplier", c.aug.alpha_multiplier);
    c.aug.dedup = a.value("dedup", c.aug.dedup);
    c.aug.length_normalize_scores =
        a.value("length_normalize_scores", c.aug.length_normalize_scores);
    c.aug.g2_prefix_tokens = a.value("g2_prefix_tokens", c.aug.g2_prefix_tokens);
    c.aug.seed = a.value("seed", c.aug.seed);
  }
  if (j.contains("decoding")) {
    const json& d = j["decoding"];
    c.aug.decoding.top_k = d.value("top_k", c.aug.decoding.top_k);
    c.aug.decoding.top_p = d.value("top_p", c.aug.decoding.top_p);
    c.aug.decoding.max_new_tokens =
        d.value("max_new_tokens", c.aug.decoding.max_new_tokens);
  }
  if (j.contains("finetune")) {
    const json& f = j["finetune"];
    c.aug.fine_tune.learning_rate = f.value("learning_rate", c.aug.fine_tune.learning_rate);
    c.aug.fine_tune.epochs = f.value("epochs", c.aug.fine_tune.epochs);
    c.aug.fine_tune.batch_size = f.value("batch_size", c.aug.fine_tune.batch_size);
    c.aug.fine_tune.warmup_fraction =
        f.value("warmup_fraction", c.aug.fine_tune.warmup_fraction);
  }
  if (j.contains("classifier")) {
    const json& f = j["classifier"];
    c.classifier_params.learning_rate =
        f.value("learning_rate", c.classifier_params.learning_rate);
    c.classifier_params.epochs = f.value("epochs", 20);
    c.classifier_params.batch_size = f.value("batch_size", c.classifier_params.batch_size);
  }
  if (j.contains("eda")) {
    const json& e = j["eda"];
    c.eda.op_fraction = e.value("op_fraction", c.eda.op_fraction);
    c.eda.deletion_prob = e.value("deletion_prob", c.eda.deletion_prob);
  }
  c.thesaurus_path = j.value("thesaurus", c.thesaurus_path);
  c.stopwords_path = j.value("stopwords", c.stopwords_path);
  c.external_command = j.value("external_command", c.external_command);
  c.backend_spec = j.value("backend", c.backend_spec);
  c.classifier_spec = j.value("classifier_backend", c.classifier_spec);
  c.out_dir = j.value("out", c.out_dir);
  return c;
}

json ExperimentConfig::to_json() const {
  return {
      {"name", name},
      {"train", train_path},
      {"dev", dev_path},
      {"test", test_path},
      {"topic", topic},
      {"method", to_string(method)},
      {"k", k_list},
      {"seeds", seeds},
      {"augmentation",
       {{"beta", aug.beta},
        {"alpha_multiplier", aug.alpha_multiplier},
        {"dedup", aug.dedup},
        {"length_normalize_scores", aug.length_normalize_scores},
        {"g2_prefix_tokens", aug.g2_prefix_tokens},
        {"seed", aug.seed}}},
      {"decoding",
       {{"top_k", aug.decoding.top_k},
        {"top_p", aug.decoding.top_p},
        {"max_new_tokens", aug.decoding.max_new_tokens}}},
      {"finetune",
       {{"learning_rate", aug.fine_tune.learning_rate},
        {"epochs", aug.fine_tune.epochs},
        {"batch_size", aug.fine_tune.batch_size},
        {"warmup_fraction", aug.fine_tune.warmup_fraction}}},
      {"classifier",
       {{"learning_rate", classifier_params.learning_rate},
        {"epochs", classifier_params.epochs},
        {"batch_size", classifier_params.batch_size}}},
      {"eda", {{"op_fraction", eda.op_fraction}, {"deletion_prob", eda.deletion_prob}}},
      {"thesaurus", thesaurus_path},
      {"stopwords", stopwords_path},
      {"external_command", external_command},
      {"backend", backend_spec},
      {"classifier_backend", classifier_spec},
      {"out", out_dir},
  };
}

void ExperimentConfig::apply_environment() {
  auto env = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? v : "";
  };
  if (auto v = env("STA_TRAIN"); !v.empty()) train_path = v;
  if (auto v = env("STA_DEV"); !v.empty()) dev_path = v;
  if (auto v = env("STA_TEST"); !v.empty()) test_path = v;
  if (auto v = env("STA_OUT"); !v.empty()) out_dir = v;
  if (auto v = env("STA_BACKEND"); !v.empty()) backend_spec = v;
}

void ExperimentConfig::validate() const {
  if (train_path.empty()) throw ConfigError("config: 'train' path is required");
  if (k_list.empty()) throw ConfigError("config: 'k' list must be non-empty");
  if (seeds.empty()) throw ConfigError("config: 'seeds' must be non-empty");
  for (int k : k_list) {
    if (k < 0) throw ConfigError("config: k must be >= 0");
  }
  aug.validate();
  classifier_params.validate();
  eda.validate();
  if (method == Method::external && external_command.empty()) {
    throw ConfigError("config: method 'external' requires 'external_command'");
  }
  if (backend_spec != "mock" && backend_spec.rfind("external:", 0) != 0) {
    throw ConfigError("config: backend must be 'mock' or 'external:<endpoint>'");
  }
  if (classifier_spec != "mock" && classifier_spec.rfind("external:", 0) != 0) {
    throw ConfigError("config: classifier backend must be 'mock' or 'external:<endpoint>'");
  }
}

std::string ExperimentConfig::hash() const {
  // The output directory does not influence results, so two runs of the
  // same experiment into different directories share a manifest hash.
  json j = to_json();
  j.erase("out");
  std::string canonical = j.dump();
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sta
