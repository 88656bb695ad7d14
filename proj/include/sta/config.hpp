#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sta/eda.hpp"
#include "sta/jsonl.hpp"
#include "sta/sta_core.hpp"

namespace sta {

enum class Method { sta, sta_noself, sta_twoprompts, eda, none, external };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

// One declarative experiment. Resolution order for paths and backend
// endpoints: CLI flags > environment (STA_TRAIN, STA_DEV, STA_TEST,
// STA_OUT, STA_BACKEND) > config file.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string train_path;
  std::string dev_path;   // required when the beta grid has > 1 entry
  std::string test_path;
  std::string topic;
  Method method = Method::sta;

  std::vector<int> k_list = {5};     // 0 means "use the full train split"
  std::vector<uint64_t> seeds = {0};

  // aug.beta is the top of the beta grid searched on the dev set (1..beta).
  AugmentationConfig aug;
  FineTuneParams classifier_params;
  EdaParams eda;
  std::string thesaurus_path;
  std::string stopwords_path;
  std::string external_command;  // method=external: "{in}" / "{out}" placeholders

  std::string backend_spec = "mock";     // "mock" | "external:<url>"
  std::string classifier_spec = "mock";  // "mock" | "external:<url>"
  std::string out_dir = "out";

  static ExperimentConfig from_file(const std::filesystem::path& path);
  static ExperimentConfig from_json(const json& j);
  json to_json() const;

  void apply_environment();
  void validate() const;

  // Stable FNV-1a hex digest of the resolved config; the manifest key for
  // bit-identical re-runs.
  std::string hash() const;
};

}  // namespace sta
