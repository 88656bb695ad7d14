#include "sta/templates.hpp"

#include <algorithm>

#include "sta/errors.hpp"
#include "sta/jsonl.hpp"

namespace sta {

std::string to_string(TemplateId id) {
  switch (id) {
    case TemplateId::c1: return "c1";
    case TemplateId::c2: return "c2";
    case TemplateId::c3: return "c3";
    case TemplateId::g1: return "g1";
    case TemplateId::g2: return "g2";
  }
  return "?";
}

TemplateId template_id_from_string(const std::string& s) {
  if (s == "c1") return TemplateId::c1;
  if (s == "c2") return TemplateId::c2;
  if (s == "c3") return TemplateId::c3;
  if (s == "g1") return TemplateId::g1;
  if (s == "g2") return TemplateId::g2;
  throw ConfigError("unknown template id '" + s + "'");
}

TemplateFamily TemplateFamily::full() {
  return {{TemplateId::c1, TemplateId::c2, TemplateId::c3},
          {TemplateId::g1, TemplateId::g2}};
}

TemplateFamily TemplateFamily::two_prompt() {
  return {{TemplateId::c1}, {TemplateId::g1}};
}

std::vector<TemplateId> TemplateFamily::all() const {
  std::vector<TemplateId> out = classification;
  out.insert(out.end(), generation.begin(), generation.end());
  return out;
}

bool TemplateFamily::contains(TemplateId id) const {
  auto a = all();
  return std::find(a.begin(), a.end(), id) != a.end();
}

namespace {

void require_nonempty(const std::string& value, const char* what) {
  if (trim(value).empty()) {
    throw ConfigError(std::string(what) + " must be non-empty");
  }
}

// x followed by a sentence boundary: append "." unless x already ends in
// terminal punctuation (matches the rendered prompts in fixtures exactly).
std::string sentence(const std::string& x) {
  if (!x.empty() && (x.back() == '.' || x.back() == '!' || x.back() == '?')) {
    return x;
  }
  return x + ".";
}

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += ", ";
    out += labels[i];
  }
  return out;
}

}  // namespace

PromptPair render_c1(const std::string& x, const std::vector<std::string>& labels,
                     const std::string& topic, const std::string& y) {
  require_nonempty(x, "text");
  require_nonempty(topic, "topic");
  if (std::find(labels.begin(), labels.end(), y) == labels.end()) {
    throw ConfigError("label '" + y + "' not in the label list");
  }
  PromptPair p;
  p.source = "Given " + topic + ": " + join_labels(labels) + ". Classify: " + x;
  p.target = y;
  p.template_id = TemplateId::c1;
  p.origin_label = y;
  return p;
}

PromptPair render_c2(const std::string& x, const std::string& topic,
                     const std::string& y) {
  require_nonempty(x, "text");
  require_nonempty(topic, "topic");
  PromptPair p;
  p.source = "Text: " + sentence(x) + " Is this text about " + y + " " + topic + "?";
  p.target = "yes";
  p.template_id = TemplateId::c2;
  p.origin_label = y;
  return p;
}

PromptPair render_c3(const std::string& x, const std::string& topic,
                     const std::string& y, const std::vector<std::string>& labels,
                     Rng& rng) {
  require_nonempty(x, "text");
  require_nonempty(topic, "topic");
  std::vector<std::string> others;
  for (const auto& l : labels) {
    if (l != y) others.push_back(l);
  }
  if (others.empty()) {
    throw ConfigError("c3 needs at least two labels");
  }
  const std::string& wrong = others[rng.below(others.size())];
  PromptPair p;
  p.source =
      "Text: " + sentence(x) + " Is this text about " + wrong + " " + topic + "?";
  p.target = "no";
  p.template_id = TemplateId::c3;
  p.origin_label = y;
  return p;
}

std::string g1_prefix(const std::string& topic, const std::string& y) {
  require_nonempty(topic, "topic");
  require_nonempty(y, "label");
  return "Description: " + y + " " + topic + ". Text:";
}

PromptPair render_g1(const std::string& x, const std::string& topic,
                     const std::string& y) {
  require_nonempty(x, "text");
  PromptPair p;
  p.source = g1_prefix(topic, y);
  p.target = x;
  p.template_id = TemplateId::g1;
  p.origin_label = y;
  return p;
}

PromptPair render_g2(const std::string& x_i, const std::string& x_j,
                     const std::string& topic, const std::string& y,
                     int prefix_tokens) {
  require_nonempty(x_i, "text");
  require_nonempty(x_j, "text");
  require_nonempty(topic, "topic");
  if (prefix_tokens < 1) {
    throw ConfigError("g2 prefix length must be >= 1 token");
  }
  std::vector<std::string> tokens = split_words(x_i);
  if (tokens.size() < static_cast<size_t>(prefix_tokens) + 1) {
    throw ConfigError("prefix split impossible: text has " +
                      std::to_string(tokens.size()) + " tokens, need > " +
                      std::to_string(prefix_tokens));
  }
  std::vector<std::string> head(tokens.begin(), tokens.begin() + prefix_tokens);
  std::vector<std::string> tail(tokens.begin() + prefix_tokens, tokens.end());
  PromptPair p;
  p.source = "Description: " + y + " " + topic + ". Text: " + sentence(x_j) +
             " Another text: " + join_words(head);
  p.target = join_words(tail);
  p.template_id = TemplateId::g2;
  p.origin_label = y;
  return p;
}

ConvertResult convert(const Dataset& d, const TemplateFamily& family,
                      uint64_t seed, int g2_prefix_tokens) {
  if (d.examples.empty()) {
    throw ConfigError("cannot convert an empty dataset");
  }
  ConvertResult result;
  const auto labels = d.verbalized_labels();
  const auto ids = family.all();

  // Same-class partner indices for g2, fixed once per conversion.
  std::map<std::string, std::vector<size_t>> by_class;
  for (size_t i = 0; i < d.examples.size(); ++i) {
    by_class[d.examples[i].label].push_back(i);
  }

  for (size_t i = 0; i < d.examples.size(); ++i) {
    const auto& ex = d.examples[i];
    const std::string y = d.verbalize(ex.label);
    for (TemplateId id : ids) {
      try {
        PromptPair p;
        switch (id) {
          case TemplateId::c1:
            p = render_c1(ex.text, labels, d.topic, y);
            break;
          case TemplateId::c2:
            p = render_c2(ex.text, d.topic, y);
            break;
          case TemplateId::c3: {
            if (labels.size() < 2) {
              ++result.skipped["c3_single_label"];
              continue;
            }
            Rng rng(Rng::mix(Rng::mix(seed, i), "c3"));
            p = render_c3(ex.text, d.topic, y, labels, rng);
            break;
          }
          case TemplateId::g1:
            p = render_g1(ex.text, d.topic, y);
            break;
          case TemplateId::g2: {
            const auto& peers = by_class[ex.label];
            if (peers.size() < 2) {
              ++result.skipped["g2_no_partner"];
              continue;
            }
            if (split_words(ex.text).size() <
                static_cast<size_t>(g2_prefix_tokens) + 1) {
              ++result.skipped["g2_too_short"];
              continue;
            }
            Rng rng(Rng::mix(Rng::mix(seed, i), "g2_partner"));
            size_t j = i;
            while (j == i) j = peers[rng.below(peers.size())];
            p = render_g2(ex.text, d.examples[j].text, d.topic, y,
                          g2_prefix_tokens);
            break;
          }
        }
        p.origin_label = ex.label;
        p.origin_index = i;
        result.pairs.push_back(std::move(p));
      } catch (const ConfigError&) {
        ++result.skipped[to_string(id) + "_unrenderable"];
      }
    }
  }
  return result;
}

void save_prompt_pairs(const std::vector<PromptPair>& pairs,
                       const std::filesystem::path& path) {
  std::vector<json> records;
  records.reserve(pairs.size());
  for (const auto& p : pairs) {
    records.push_back({{"source", p.source},
                       {"target", p.target},
                       {"template_id", to_string(p.template_id)},
                       {"origin_label", p.origin_label},
                       {"origin_index", p.origin_index}});
  }
  write_jsonl(path, records);
}

std::vector<PromptPair> load_prompt_pairs(const std::filesystem::path& path) {
  std::vector<PromptPair> pairs;
  for (const auto& rec : read_jsonl(path)) {
    PromptPair p;
    p.source = rec.at("source").get<std::string>();
    p.target = rec.at("target").get<std::string>();
    p.template_id = template_id_from_string(rec.at("template_id").get<std::string>());
    p.origin_label = rec.at("origin_label").get<std::string>();
    p.origin_index = rec.at("origin_index").get<size_t>();
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace sta
