#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sta/corpus.hpp"
#include "sta/rng.hpp"

namespace sta {

enum class TemplateId { c1, c2, c3, g1, g2 };

std::string to_string(TemplateId id);
TemplateId template_id_from_string(const std::string& s);

// One (source, target) training sequence pair produced by a template.
struct PromptPair {
  std::string source;
  std::string target;
  TemplateId template_id = TemplateId::c1;
  std::string origin_label;
  size_t origin_index = 0;

  bool is_classification() const {
    return template_id == TemplateId::c1 || template_id == TemplateId::c2 ||
           template_id == TemplateId::c3;
  }
};

// Ordered family of template identifiers, split into classification and
// generation halves.
struct TemplateFamily {
  std::vector<TemplateId> classification;
  std::vector<TemplateId> generation;

  // {c1,c2,c3} + {g1,g2}
  static TemplateFamily full();
  // {c1} + {g1}, the two-prompt ablation
  static TemplateFamily two_prompt();

  std::vector<TemplateId> all() const;
  bool contains(TemplateId id) const;
};

// Template renderers. Inputs are verbatim strings: `labels` is the
// dataset's ordered verbalized inventory and `y` a verbalized label.
// No normalization of x is performed. When x is embedded mid-sentence a
// "." is appended only if x does not already end in terminal punctuation,
// which keeps rendered prompts free of doubled periods.

// source "Given {topic}: {labels joined by ', '}. Classify: {x}", target y
PromptPair render_c1(const std::string& x, const std::vector<std::string>& labels,
                     const std::string& topic, const std::string& y);

// source "Text: {x} Is this text about {y} {topic}?", target "yes"
PromptPair render_c2(const std::string& x, const std::string& topic,
                     const std::string& y);

// Like c2 but asks about a uniformly drawn wrong label; target "no".
PromptPair render_c3(const std::string& x, const std::string& topic,
                     const std::string& y, const std::vector<std::string>& labels,
                     Rng& rng);

// The decoding prefix "Description: {y} {topic}. Text:" used both as the
// g1 training source and as the per-class generation prompt.
std::string g1_prefix(const std::string& topic, const std::string& y);

// Training-time g1 pair: (g1_prefix, x).
PromptPair render_g1(const std::string& x, const std::string& topic,
                     const std::string& y);

// source "Description: {y} {topic}. Text: {x_j} Another text: {prefix of x_i}",
// target = remainder of x_i. The prefix length is in whitespace tokens.
PromptPair render_g2(const std::string& x_i, const std::string& x_j,
                     const std::string& topic, const std::string& y,
                     int prefix_tokens = 3);

struct ConvertResult {
  std::vector<PromptPair> pairs;          // D_t, deterministic order
  std::map<std::string, size_t> skipped;  // skip reason -> count
};

// D_t = union over the family of T(D_o). Pairs with unsatisfiable
// preconditions (g2 on too-short texts or partnerless classes, c3 on
// single-label data) are skipped and counted, never fabricated.
ConvertResult convert(const Dataset& d, const TemplateFamily& family,
                      uint64_t seed, int g2_prefix_tokens = 3);

void save_prompt_pairs(const std::vector<PromptPair>& pairs,
                       const std::filesystem::path& path);
std::vector<PromptPair> load_prompt_pairs(const std::filesystem::path& path);

}  // namespace sta
