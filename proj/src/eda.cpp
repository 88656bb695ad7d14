#include "sta/eda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sta/errors.hpp"
#include "sta/rng.hpp"

namespace sta {

void EdaParams::validate() const {
  if (op_fraction < 0.0 || op_fraction > 1.0) {
    throw ConfigError("op_fraction must be in [0, 1]");
  }
  if (deletion_prob < 0.0 || deletion_prob > 1.0) {
    throw ConfigError("deletion_prob must be in [0, 1]");
  }
}

Thesaurus Thesaurus::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open thesaurus: " + path.string());
  Thesaurus t;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'word<TAB>syn1,syn2,...'");
    }
    std::string word = trim(line.substr(0, tab));
    std::vector<std::string> syns;
    std::string rest = line.substr(tab + 1);
    size_t pos = 0;
    while (pos <= rest.size()) {
      size_t comma = rest.find(',', pos);
      std::string syn = trim(rest.substr(pos, comma - pos));
      if (!syn.empty()) syns.push_back(syn);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (syns.empty() || (syns.size() == 1 && syns[0] == word)) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": '" + word + "' needs a synonym other than itself");
    }
    t.entries[word] = std::move(syns);
  }
  return t;
}

const std::vector<std::string>* Thesaurus::lookup(const std::string& word) const {
  auto it = entries.find(word);
  return it != entries.end() ? &it->second : nullptr;
}

std::set<std::string> default_stopwords() {
  return {"a",    "an",  "and", "are", "as",   "at",   "be",  "but", "by",
          "for",  "if",  "in",  "into", "is",  "it",   "no",  "not", "of",
          "on",   "or",  "such", "that", "the", "their", "then", "there",
          "these", "they", "this", "to", "was", "will", "with"};
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stopword file: " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = trim(line);
    if (!w.empty()) words.insert(w);
  }
  return words;
}

namespace {

size_t op_count(double fraction, size_t length) {
  return std::max<size_t>(1, static_cast<size_t>(std::llround(fraction * static_cast<double>(length))));
}

std::vector<size_t> eligible_positions(const std::vector<std::string>& words,
                                       const Thesaurus& thesaurus,
                                       const std::set<std::string>& stopwords) {
  std::vector<size_t> out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (!stopwords.count(words[i]) && thesaurus.lookup(words[i])) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

std::string synonym_replace(const std::string& text, const EdaParams& params,
                            const Thesaurus& thesaurus,
                            const std::set<std::string>& stopwords) {
  params.validate();
  std::vector<std::string> words = split_words(text);
  if (words.empty()) return text;
  Rng rng(Rng::mix(params.seed, "synonym_replace"));
  std::vector<size_t> eligible = eligible_positions(words, thesaurus, stopwords);
  if (eligible.empty()) return join_words(words);
  size_t n = std::min(op_count(params.op_fraction, words.size()), eligible.size());
  rng.shuffle(eligible);
  for (size_t i = 0; i < n; ++i) {
    const auto* syns = thesaurus.lookup(words[eligible[i]]);
    words[eligible[i]] = (*syns)[rng.below(syns->size())];
  }
  return join_words(words);
}

std::string random_insert(const std::string& text, const EdaParams& params,
                          const Thesaurus& thesaurus,
                          const std::set<std::string>& stopwords) {
  params.validate();
  std::vector<std::string> words = split_words(text);
  if (words.empty()) return text;
  Rng rng(Rng::mix(params.seed, "random_insert"));
  std::vector<size_t> eligible = eligible_positions(words, thesaurus, stopwords);
  if (eligible.empty()) return join_words(words);
  size_t n = op_count(params.op_fraction, words.size());
  for (size_t i = 0; i < n; ++i) {
    const std::string& word = words[eligible[rng.below(eligible.size())]];
    const auto* syns = thesaurus.lookup(word);
    const std::string& syn = (*syns)[rng.below(syns->size())];
    size_t pos = rng.below(words.size() + 1);
    words.insert(words.begin() + static_cast<long>(pos), syn);
    eligible = eligible_positions(words, thesaurus, stopwords);
  }
  return join_words(words);
}

std::string random_swap(const std::string& text, const EdaParams& params) {
  params.validate();
  std::vector<std::string> words = split_words(text);
  if (words.size() < 2) return join_words(words);
  Rng rng(Rng::mix(params.seed, "random_swap"));
  size_t n = op_count(params.op_fraction, words.size());
  for (size_t i = 0; i < n; ++i) {
    size_t a = rng.below(words.size());
    size_t b = rng.below(words.size());
    std::swap(words[a], words[b]);
  }
  return join_words(words);
}

std::string random_delete(const std::string& text, const EdaParams& params) {
  params.validate();
  std::vector<std::string> words = split_words(text);
  if (words.empty()) return text;
  Rng rng(Rng::mix(params.seed, "random_delete"));
  std::vector<std::string> kept;
  for (const auto& w : words) {
    if (rng.unit() >= params.deletion_prob) kept.push_back(w);
  }
  if (kept.empty()) {
    kept.push_back(words[rng.below(words.size())]);
  }
  return join_words(kept);
}

Dataset eda_augment(const Dataset& d, int per_example, const EdaParams& params,
                    const Thesaurus& thesaurus,
                    const std::set<std::string>& stopwords) {
  params.validate();
  if (per_example < 1) throw ConfigError("per_example must be >= 1");
  std::vector<LabeledExample> generated;
  generated.reserve(d.examples.size() * static_cast<size_t>(per_example));
  for (size_t i = 0; i < d.examples.size(); ++i) {
    for (int v = 0; v < per_example; ++v) {
      uint64_t seed = Rng::mix(Rng::mix(params.seed, i), static_cast<uint64_t>(v));
      EdaParams local = params;
      local.seed = seed;
      Rng op_rng(Rng::mix(seed, "op_choice"));
      std::string out;
      switch (op_rng.below(4)) {
        case 0: out = synonym_replace(d.examples[i].text, local, thesaurus, stopwords); break;
        case 1: out = random_insert(d.examples[i].text, local, thesaurus, stopwords); break;
        case 2: out = random_swap(d.examples[i].text, local); break;
        default: out = random_delete(d.examples[i].text, local); break;
      }
      LabeledExample ex;
      ex.text = out;
      ex.label = d.examples[i].label;
      ex.provenance = "generated";
      generated.push_back(std::move(ex));
    }
  }
  return Dataset::make(d.name + "-eda", d.topic, d.labels, std::move(generated),
                       d.verbalizations);
}

}  // namespace sta
