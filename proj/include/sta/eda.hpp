#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sta/corpus.hpp"

namespace sta {

struct EdaParams {
  // Fraction of words affected per operation; n = max(1, round(fraction * len))
  // for replacement, insertion and swap.
  double op_fraction = 0.1;
  double deletion_prob = 0.1;
  uint64_t seed = 0;

  void validate() const;
};

// word -> synonyms. Loaded from a flat file "word<TAB>syn1,syn2,...".
struct Thesaurus {
  std::map<std::string, std::vector<std::string>> entries;

  static Thesaurus from_file(const std::filesystem::path& path);
  const std::vector<std::string>* lookup(const std::string& word) const;
};

std::set<std::string> default_stopwords();
std::set<std::string> load_stopwords(const std::filesystem::path& path);

// The four rule-based operations. Tokenization is whitespace split,
// detokenization single-space join; all are deterministic under the seed
// and return non-empty text for non-empty input.
std::string synonym_replace(const std::string& text, const EdaParams& params,
                            const Thesaurus& thesaurus,
                            const std::set<std::string>& stopwords);
std::string random_insert(const std::string& text, const EdaParams& params,
                          const Thesaurus& thesaurus,
                          const std::set<std::string>& stopwords);
std::string random_swap(const std::string& text, const EdaParams& params);
std::string random_delete(const std::string& text, const EdaParams& params);

// `per_example` variants per original, each from one uniformly chosen
// operation, labels copied from the source example.
Dataset eda_augment(const Dataset& d, int per_example, const EdaParams& params,
                    const Thesaurus& thesaurus,
                    const std::set<std::string>& stopwords);

}  // namespace sta
