#include "sta/corpus.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "sta/errors.hpp"
#include "sta/jsonl.hpp"
#include "sta/rng.hpp"

namespace sta {

std::string trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> words;
  std::istringstream ss(s);
  std::string w;
  while (ss >> w) words.push_back(std::move(w));
  return words;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += words[i];
  }
  return out;
}

Dataset Dataset::make(std::string name, std::string topic,
                      std::vector<std::string> labels,
                      std::vector<LabeledExample> examples,
                      std::map<std::string, std::string> verbalizations) {
  if (labels.empty()) {
    throw ConfigError("dataset '" + name + "': empty label inventory");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      throw ConfigError("dataset '" + name + "': duplicate label '" + l + "'");
    }
  }
  for (size_t i = 0; i < examples.size(); ++i) {
    if (trim(examples[i].text).empty()) {
      throw ConfigError("dataset '" + name + "': example " + std::to_string(i) +
                        " has empty text");
    }
    if (!seen.count(examples[i].label)) {
      throw ConfigError("dataset '" + name + "': example " + std::to_string(i) +
                        " has label '" + examples[i].label +
                        "' outside the inventory");
    }
  }
  Dataset d;
  d.name = std::move(name);
  d.topic = std::move(topic);
  d.labels = std::move(labels);
  d.verbalizations = std::move(verbalizations);
  d.examples = std::move(examples);
  return d;
}

const std::string& Dataset::verbalize(const std::string& label) const {
  auto it = verbalizations.find(label);
  return it != verbalizations.end() ? it->second : label;
}

std::vector<std::string> Dataset::verbalized_labels() const {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(verbalize(l));
  return out;
}

bool Dataset::has_label(const std::string& label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

Dataset load_dataset(const std::filesystem::path& path, const std::string& topic) {
  std::string name = path.stem().string();
  std::string resolved_topic = topic;
  std::vector<std::string> inventory;
  std::map<std::string, std::string> verbalizations;
  bool inventory_supplied = false;

  auto sidecar = path;
  sidecar += ".meta.json";
  if (std::filesystem::exists(sidecar)) {
    json meta = json::parse(read_text_file(sidecar), nullptr, false);
    if (meta.is_discarded()) {
      throw ConfigError("malformed sidecar metadata: " + sidecar.string());
    }
    if (meta.contains("name")) name = meta["name"].get<std::string>();
    if (resolved_topic.empty() && meta.contains("topic")) {
      resolved_topic = meta["topic"].get<std::string>();
    }
    if (meta.contains("labels")) {
      inventory = meta["labels"].get<std::vector<std::string>>();
      inventory_supplied = true;
    }
    if (meta.contains("verbalizations")) {
      for (auto& [k, v] : meta["verbalizations"].items()) {
        verbalizations[k] = v.get<std::string>();
      }
    }
  }

  std::vector<json> records = read_jsonl(path);
  if (records.empty()) {
    throw ConfigError("empty dataset: " + path.string());
  }

  std::vector<LabeledExample> examples;
  examples.reserve(records.size());
  std::set<std::string> encountered;
  for (size_t i = 0; i < records.size(); ++i) {
    const json& rec = records[i];
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    if (!rec.is_object() || !rec.contains("text") || !rec["text"].is_string()) {
      throw ConfigError(where + ": record missing string field 'text'");
    }
    if (!rec.contains("label") || !rec["label"].is_string()) {
      throw ConfigError(where + ": record missing string field 'label'");
    }
    LabeledExample ex;
    ex.text = rec["text"].get<std::string>();
    ex.label = rec["label"].get<std::string>();
    if (rec.contains("provenance")) ex.provenance = rec["provenance"].get<std::string>();
    if (trim(ex.text).empty()) {
      throw ConfigError(where + ": empty text");
    }
    if (inventory_supplied &&
        std::find(inventory.begin(), inventory.end(), ex.label) == inventory.end()) {
      throw ConfigError(where + ": label '" + ex.label +
                        "' outside the supplied inventory");
    }
    encountered.insert(ex.label);
    examples.push_back(std::move(ex));
  }
  if (!inventory_supplied) {
    inventory.assign(encountered.begin(), encountered.end());  // sorted set
  }
  return Dataset::make(name, resolved_topic, std::move(inventory),
                       std::move(examples), std::move(verbalizations));
}

void save_dataset(const Dataset& d, const std::filesystem::path& path,
                  bool write_sidecar) {
  std::vector<json> records;
  records.reserve(d.examples.size());
  for (const auto& ex : d.examples) {
    json rec = {{"text", ex.text}, {"label", ex.label}};
    if (!ex.provenance.empty()) rec["provenance"] = ex.provenance;
    records.push_back(std::move(rec));
  }
  write_jsonl(path, records);
  if (write_sidecar) {
    json meta = {{"name", d.name}, {"topic", d.topic}, {"labels", d.labels}};
    if (!d.verbalizations.empty()) meta["verbalizations"] = d.verbalizations;
    auto sidecar = path;
    sidecar += ".meta.json";
    write_text_file(sidecar, meta.dump(2) + "\n");
  }
}

Dataset sample_k_shot(const Dataset& d, const KShotSpec& spec) {
  if (spec.k < 1) {
    throw ConfigError("k-shot spec requires k >= 1");
  }
  auto counts = per_class_counts(d);
  for (const auto& label : d.labels) {
    if (counts[label] < static_cast<size_t>(spec.k)) {
      throw ConfigError("class '" + label + "' has only " +
                        std::to_string(counts[label]) + " examples, need " +
                        std::to_string(spec.k));
    }
  }
  std::vector<size_t> chosen;
  for (const auto& label : d.labels) {
    std::vector<size_t> indices;
    for (size_t i = 0; i < d.examples.size(); ++i) {
      if (d.examples[i].label == label) indices.push_back(i);
    }
    Rng rng(Rng::mix(spec.seed, label));
    rng.shuffle(indices);
    chosen.insert(chosen.end(), indices.begin(),
                  indices.begin() + static_cast<size_t>(spec.k));
  }
  std::sort(chosen.begin(), chosen.end());  // keep original order
  std::vector<LabeledExample> examples;
  examples.reserve(chosen.size());
  for (size_t i : chosen) examples.push_back(d.examples[i]);
  return Dataset::make(d.name, d.topic, d.labels, std::move(examples),
                       d.verbalizations);
}

std::map<std::string, size_t> per_class_counts(const Dataset& d) {
  std::map<std::string, size_t> counts;
  for (const auto& label : d.labels) counts[label] = 0;
  for (const auto& ex : d.examples) ++counts[ex.label];
  return counts;
}

}  // namespace sta
