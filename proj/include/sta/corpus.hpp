#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sta {

struct LabeledExample {
  std::string text;   // non-empty after trimming
  std::string label;  // member of the owning dataset's inventory
  std::string provenance;  // empty for original data, "generated" for synthetic
};

// An immutable labeled text corpus. Construct via load_dataset or the
// make() factory, which validate the invariants; never mutate afterwards.
struct Dataset {
  std::string name;
  std::string topic;  // short keyword, e.g. "sentiment"
  std::vector<std::string> labels;  // ordered, duplicate-free inventory
  std::map<std::string, std::string> verbalizations;  // optional label -> text
  std::vector<LabeledExample> examples;

  // Validates: non-empty inventory, no duplicate labels, every example's
  // label in the inventory, every text non-empty after trimming.
  static Dataset make(std::string name, std::string topic,
                      std::vector<std::string> labels,
                      std::vector<LabeledExample> examples,
                      std::map<std::string, std::string> verbalizations = {});

  const std::string& verbalize(const std::string& label) const;
  std::vector<std::string> verbalized_labels() const;
  bool has_label(const std::string& label) const;
};

struct KShotSpec {
  int k = 1;  // examples per class, >= 1
  uint64_t seed = 0;
};

// Reads a line-delimited dataset file (records with string fields `text`
// and `label`). If `<path>.meta.json` exists it supplies name, topic,
// ordered label inventory and verbalizations; otherwise the inventory is
// the sorted set of labels encountered and `topic` is taken from the
// argument. A `topic` argument always overrides the sidecar when non-empty.
Dataset load_dataset(const std::filesystem::path& path, const std::string& topic = "");

void save_dataset(const Dataset& d, const std::filesystem::path& path,
                  bool write_sidecar = false);

// Stratified k-shot subsample, without replacement, deterministic for a
// fixed (dataset, k, seed). The per-class draw is keyed by (seed, label)
// so adding a class does not perturb other classes' draws.
Dataset sample_k_shot(const Dataset& d, const KShotSpec& spec);

// Counts per inventory label (labels absent from examples map to 0).
std::map<std::string, size_t> per_class_counts(const Dataset& d);

std::string trim(const std::string& s);
std::vector<std::string> split_words(const std::string& s);
std::string join_words(const std::vector<std::string>& words);

}  // namespace sta
