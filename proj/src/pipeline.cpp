#include "sta/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>

#include "sta/errors.hpp"

namespace sta {

namespace {

constexpr const char* kVersion = "0.1.0";

TemplateFamily family_for(Method m) {
  return m == Method::sta_twoprompts ? TemplateFamily::two_prompt()
                                     : TemplateFamily::full();
}

AugmentationConfig aug_for(const ExperimentConfig& cfg, int k, uint64_t seed) {
  AugmentationConfig a = cfg.aug;
  a.family = family_for(cfg.method);
  a.self_check = cfg.method != Method::sta_noself;
  a.seed = Rng::mix(Rng::mix(cfg.aug.seed, static_cast<uint64_t>(k)), seed);
  a.fine_tune.seed = seed;
  a.decoding.seed = seed;
  return a;
}

Dataset load_required(const std::string& path, const std::string& topic,
                      const char* what) {
  if (path.empty()) {
    throw ConfigError(std::string(what) + " dataset path is required");
  }
  return load_dataset(path, topic);
}

Thesaurus load_thesaurus_or_default(const ExperimentConfig& cfg) {
  if (!cfg.thesaurus_path.empty()) return Thesaurus::from_file(cfg.thesaurus_path);
  // Small built-in table so EDA runs hermetically without a lexical database.
  Thesaurus t;
  t.entries = {
      {"good", {"fine", "great", "nice"}},
      {"great", {"good", "excellent"}},
      {"bad", {"poor", "awful"}},
      {"movie", {"film", "picture"}},
      {"film", {"movie", "picture"}},
      {"story", {"tale", "plot"}},
      {"funny", {"amusing", "comic"}},
      {"sad", {"unhappy", "sorrowful"}},
      {"happy", {"glad", "joyful"}},
      {"boring", {"dull", "tedious"}},
      {"exciting", {"thrilling", "gripping"}},
      {"people", {"folks", "persons"}},
      {"big", {"large", "huge"}},
      {"small", {"little", "tiny"}},
      {"fast", {"quick", "rapid"}},
      {"slow", {"sluggish", "leisurely"}},
  };
  return t;
}

std::set<std::string> load_stopwords_or_default(const ExperimentConfig& cfg) {
  if (!cfg.stopwords_path.empty()) return load_stopwords(cfg.stopwords_path);
  return default_stopwords();
}

void write_manifest(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  json manifest = {{"config_hash", cfg.hash()},
                   {"name", cfg.name},
                   {"version", kVersion},
                   {"method", to_string(cfg.method)},
                   {"k", cfg.k_list},
                   {"seeds", cfg.seeds},
                   {"backend", cfg.backend_spec}};
  write_text_file(std::filesystem::path(cfg.out_dir) / "manifest.json",
                  manifest.dump(2) + "\n");
  write_text_file(std::filesystem::path(cfg.out_dir) / "config.json",
                  cfg.to_json().dump(2) + "\n");
}

std::string substitute(std::string s, const std::string& key, const std::string& value) {
  size_t pos;
  while ((pos = s.find(key)) != std::string::npos) s.replace(pos, key.size(), value);
  return s;
}

}  // namespace

BackendBundle make_backends(const ExperimentConfig& cfg) {
  BackendBundle b;
  if (cfg.backend_spec == "mock") {
    b.backend_owner = std::make_unique<MockSeq2SeqBackend>();
  } else {
    b.backend_owner = std::make_unique<HttpSeq2SeqBackend>(
        cfg.backend_spec.substr(std::string("external:").size()));
  }
  if (cfg.classifier_spec == "mock") {
    b.classifier_owner = std::make_unique<MockClassifier>();
  } else {
    b.classifier_owner = std::make_unique<HttpClassifier>(
        cfg.classifier_spec.substr(std::string("external:").size()));
  }
  b.backend = b.backend_owner.get();
  b.classifier = b.classifier_owner.get();
  return b;
}

std::filesystem::path run_dir(const ExperimentConfig& cfg, int k, uint64_t seed) {
  return std::filesystem::path(cfg.out_dir) / "runs" /
         ("k" + std::to_string(k) + "_s" + std::to_string(seed));
}

Dataset stage_kshot(const ExperimentConfig& cfg, const Dataset& train, int k,
                    uint64_t seed) {
  auto dir = run_dir(cfg, k, seed);
  std::filesystem::create_directories(dir);
  auto path = dir / "train_kshot.jsonl";
  if (std::filesystem::exists(path)) {
    return load_dataset(path, cfg.topic);
  }
  Dataset kshot = k == 0 ? train : sample_k_shot(train, {k, seed});
  save_dataset(kshot, path, /*write_sidecar=*/true);
  return kshot;
}

Dataset stage_augment(const ExperimentConfig& cfg, const Dataset& kshot, int k,
                      uint64_t seed, Seq2SeqBackend& backend) {
  auto dir = run_dir(cfg, k, seed);
  std::filesystem::create_directories(dir);
  auto d_star_path = dir / "d_star_full.jsonl";
  if (std::filesystem::exists(d_star_path)) {
    if (cfg.method == Method::none) {
      return Dataset::make(kshot.name + "-aug", kshot.topic, kshot.labels, {},
                           kshot.verbalizations);
    }
    return load_dataset(d_star_path, cfg.topic);
  }

  Dataset d_star = Dataset::make(kshot.name + "-aug", kshot.topic, kshot.labels,
                                 {}, kshot.verbalizations);
  switch (cfg.method) {
    case Method::none:
      break;
    case Method::eda: {
      Thesaurus thesaurus = load_thesaurus_or_default(cfg);
      auto stopwords = load_stopwords_or_default(cfg);
      EdaParams params = cfg.eda;
      params.seed = Rng::mix(Rng::mix(cfg.eda.seed, static_cast<uint64_t>(k)), seed);
      d_star = eda_augment(kshot, cfg.aug.beta, params, thesaurus, stopwords);
      break;
    }
    case Method::external: {
      std::string cmd = substitute(cfg.external_command, "{in}",
                                   (dir / "train_kshot.jsonl").string());
      cmd = substitute(cmd, "{out}", d_star_path.string());
      int rc = std::system(cmd.c_str());
      if (rc != 0) {
        throw std::runtime_error("external augmenter failed (exit " +
                                 std::to_string(rc) + "): " + cmd);
      }
      if (!std::filesystem::exists(d_star_path)) {
        throw std::runtime_error("external augmenter wrote no output: " + cmd);
      }
      return load_dataset(d_star_path, cfg.topic);
    }
    default: {  // STA variants
      AugmentationConfig aug = aug_for(cfg, k, seed);
      StaRunResult result = run_sta(kshot, aug, backend);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      save_prompt_pairs(result.conversion.pairs, dir / "d_t.jsonl");
      save_candidate_audit(result.audit, dir / "candidates_audit.jsonl");
      json meta = {{"handle", result.handle},
                   {"realized_alpha", result.realized_alpha},
                   {"skipped", result.conversion.skipped}};
      write_text_file(dir / "augment_meta.json", meta.dump(2) + "\n");
      d_star = std::move(result.augmented);
      break;
    }
  }
  save_dataset(d_star, d_star_path);
  return d_star;
}

Dataset beta_subset(const ExperimentConfig& cfg, const Dataset& kshot,
                    const Dataset& d_star_full, int beta) {
  std::vector<LabeledExample> kept;
  if (cfg.method == Method::eda) {
    // eda_augment emits example-major, variant-minor: keep variants < beta.
    int beta_max = cfg.aug.beta;
    for (size_t i = 0; i < d_star_full.examples.size(); ++i) {
      if (static_cast<int>(i % static_cast<size_t>(beta_max)) < beta) {
        kept.push_back(d_star_full.examples[i]);
      }
    }
  } else {
    // Per-class prefix of the persisted selection ranking.
    auto counts = per_class_counts(kshot);
    std::map<std::string, size_t> budget;
    for (const auto& [label, n_y] : counts) {
      budget[label] = static_cast<size_t>(beta) * n_y;
    }
    for (const auto& ex : d_star_full.examples) {
      if (budget[ex.label] > 0) {
        --budget[ex.label];
        kept.push_back(ex);
      }
    }
  }
  return Dataset::make(d_star_full.name + "-b" + std::to_string(beta),
                       d_star_full.topic, d_star_full.labels, std::move(kept),
                       d_star_full.verbalizations);
}

void cmd_convert(const ExperimentConfig& cfg) {
  cfg.validate();
  Dataset train = load_required(cfg.train_path, cfg.topic, "train");
  ConvertResult result =
      convert(train, family_for(cfg.method), cfg.aug.seed, cfg.aug.g2_prefix_tokens);
  std::filesystem::create_directories(cfg.out_dir);
  save_prompt_pairs(result.pairs, std::filesystem::path(cfg.out_dir) / "d_t.jsonl");

  std::map<std::string, size_t> per_template;
  for (const auto& p : result.pairs) ++per_template[to_string(p.template_id)];
  for (const auto& [id, n] : per_template) {
    std::cout << id << ": " << n << " pairs\n";
  }
  for (const auto& [reason, n] : result.skipped) {
    std::cout << "skipped " << reason << ": " << n << "\n";
  }
  std::cout << "total: " << result.pairs.size() << " pairs\n";
}

void cmd_finetune(const ExperimentConfig& cfg) {
  cfg.validate();
  Dataset train = load_required(cfg.train_path, cfg.topic, "train");
  ConvertResult result =
      convert(train, family_for(cfg.method), cfg.aug.seed, cfg.aug.g2_prefix_tokens);
  std::vector<PromptPair> stream = result.pairs;
  Rng rng(Rng::mix(cfg.aug.seed, "joint_shuffle"));
  rng.shuffle(stream);

  BackendBundle backends = make_backends(cfg);
  std::string handle = backends.backend->fine_tune(stream, cfg.aug.fine_tune);
  std::filesystem::create_directories(cfg.out_dir);
  save_prompt_pairs(result.pairs, std::filesystem::path(cfg.out_dir) / "d_t.jsonl");
  write_text_file(std::filesystem::path(cfg.out_dir) / "handle.json",
                  json({{"handle", handle}, {"backend", cfg.backend_spec}}).dump(2) + "\n");
  std::cout << "fine-tuned handle: " << handle << "\n";
}

void cmd_augment(const ExperimentConfig& cfg) {
  cfg.validate();
  Dataset train = load_required(cfg.train_path, cfg.topic, "train");
  BackendBundle backends = make_backends(cfg);
  write_manifest(cfg);
  for (int k : cfg.k_list) {
    for (uint64_t seed : cfg.seeds) {
      Dataset kshot = stage_kshot(cfg, train, k, seed);
      Dataset d_star = stage_augment(cfg, kshot, k, seed, *backends.backend);
      std::cout << "k=" << k << " seed=" << seed << ": |D*| = "
                << d_star.examples.size() << "\n";
    }
  }
}

namespace {

RunOutcome evaluate_run(const ExperimentConfig& cfg, const Dataset& kshot,
                        const Dataset& d_star_full, const Dataset* dev,
                        const Dataset& test, int k, uint64_t seed,
                        Classifier& classifier,
                        const std::optional<std::string>& oracle_handle,
                        Classifier* oracle) {
  RunOutcome outcome;
  outcome.k = k;
  outcome.seed = seed;

  FineTuneParams params = cfg.classifier_params;
  params.seed = seed;

  int beta_max = cfg.method == Method::none ? 1 : cfg.aug.beta;
  int chosen_beta = 1;
  if (beta_max > 1) {
    if (dev == nullptr) {
      throw ConfigError("dev set required for beta selection");
    }
    double best = -1.0;
    for (int beta = 1; beta <= beta_max; ++beta) {
      Dataset subset = beta_subset(cfg, kshot, d_star_full, beta);
      auto rows = downstream_eval(kshot, &subset, *dev, classifier, params,
                                  {seed}, to_string(cfg.method), k);
      if (rows.front().accuracy > best) {
        best = rows.front().accuracy;
        chosen_beta = beta;
      }
    }
    outcome.dev_accuracy = best;
  }
  outcome.chosen_beta = chosen_beta;

  Dataset subset = cfg.method == Method::none
                       ? d_star_full
                       : beta_subset(cfg, kshot, d_star_full, chosen_beta);
  const Dataset* aug = subset.examples.empty() ? nullptr : &subset;
  auto rows = downstream_eval(kshot, aug, test, classifier, params, {seed},
                              to_string(cfg.method), k);
  outcome.test_accuracy = rows.front().accuracy;

  if (!subset.examples.empty()) {
    DiversityScore div = diversity(kshot, subset);
    outcome.diversity_ratio = div.ratio;
    if (oracle != nullptr && oracle_handle) {
      outcome.fidelity_accuracy = fidelity(subset, *oracle, *oracle_handle).accuracy;
    }
  }
  return outcome;
}

}  // namespace

void cmd_evaluate(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.test_path.empty()) throw ConfigError("config: 'test' path is required");
  if (cfg.aug.beta > 1 && cfg.method != Method::none && cfg.dev_path.empty()) {
    throw ConfigError("dev set required for beta selection");
  }

  Dataset train = load_required(cfg.train_path, cfg.topic, "train");
  Dataset test = load_required(cfg.test_path, cfg.topic, "test");
  std::optional<Dataset> dev;
  if (!cfg.dev_path.empty()) dev = load_dataset(cfg.dev_path, cfg.topic);

  BackendBundle backends = make_backends(cfg);

  // Fidelity oracle: trained once on the full original training data.
  FineTuneParams oracle_params = cfg.classifier_params;
  oracle_params.seed = 0;
  std::string oracle_handle = backends.classifier->train(train, oracle_params);

  RunReport report;
  std::vector<json> scatter;
  for (int k : cfg.k_list) {
    std::vector<EvalRow> k_rows;
    std::vector<RunOutcome> k_outcomes;
    for (uint64_t seed : cfg.seeds) {
      auto dir = run_dir(cfg, k, seed);
      auto kshot_path = dir / "train_kshot.jsonl";
      auto d_star_path = dir / "d_star_full.jsonl";
      if (!std::filesystem::exists(kshot_path) ||
          !std::filesystem::exists(d_star_path)) {
        throw ConfigError("missing augmentation outputs under " + dir.string() +
                          "; run `sta augment` or `sta pipeline` first");
      }
      Dataset kshot = load_dataset(kshot_path, cfg.topic);
      Dataset d_star_full =
          cfg.method == Method::none
              ? Dataset::make(kshot.name + "-aug", kshot.topic, kshot.labels, {},
                              kshot.verbalizations)
              : load_dataset(d_star_path, cfg.topic);

      RunOutcome outcome = evaluate_run(
          cfg, kshot, d_star_full, dev ? &*dev : nullptr, test, k, seed,
          *backends.classifier, oracle_handle, backends.classifier);
      k_rows.push_back({to_string(cfg.method), k, seed, outcome.test_accuracy});
      k_outcomes.push_back(outcome);

      json rec = {{"k", k}, {"seed", seed}, {"beta", outcome.chosen_beta},
                  {"test_accuracy", outcome.test_accuracy}};
      if (outcome.dev_accuracy) rec["dev_accuracy"] = *outcome.dev_accuracy;
      if (outcome.diversity_ratio) rec["diversity"] = *outcome.diversity_ratio;
      if (outcome.fidelity_accuracy) rec["fidelity"] = *outcome.fidelity_accuracy;
      write_text_file(dir / "result.json", rec.dump(2) + "\n");

      if (outcome.diversity_ratio && outcome.fidelity_accuracy) {
        scatter.push_back({{"method", to_string(cfg.method)},
                           {"k", k},
                           {"seed", seed},
                           {"diversity", *outcome.diversity_ratio},
                           {"fidelity", *outcome.fidelity_accuracy}});
      }
    }
    report.rows.insert(report.rows.end(), k_rows.begin(), k_rows.end());
    AggregateRow agg = aggregate(k_rows);
    agg.chosen_beta = k_outcomes.front().chosen_beta;
    std::vector<double> divs, fids;
    for (const auto& o : k_outcomes) {
      if (o.diversity_ratio) divs.push_back(*o.diversity_ratio);
      if (o.fidelity_accuracy) fids.push_back(*o.fidelity_accuracy);
    }
    if (!divs.empty()) agg.diversity = mean_std(divs).first;
    if (!fids.empty()) agg.fidelity = mean_std(fids).first;
    report.aggregates.push_back(agg);
  }

  std::filesystem::create_directories(cfg.out_dir);
  save_report(report, std::filesystem::path(cfg.out_dir) / "report.jsonl");
  write_text_file(std::filesystem::path(cfg.out_dir) / "report.txt",
                  report_table(report));
  write_jsonl(std::filesystem::path(cfg.out_dir) / "scatter.jsonl", scatter);
  std::cout << report_table(report);
}

void cmd_pipeline(const ExperimentConfig& cfg) {
  cmd_augment(cfg);
  cmd_evaluate(cfg);
}

}  // namespace sta
