#include "sta/sta_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sta/errors.hpp"
#include "sta/jsonl.hpp"
#include "sta/rng.hpp"

namespace sta {

void AugmentationConfig::validate() const {
  if (beta < 1) throw ConfigError("beta must be >= 1");
  if (alpha_multiplier < 2) {
    throw ConfigError("alpha_multiplier must be >= 2 so that alpha > beta");
  }
  if (g2_prefix_tokens < 1) throw ConfigError("g2_prefix_tokens must be >= 1");
  decoding.validate();
  fine_tune.validate();
}

std::vector<double> softmax(const std::vector<double>& scores) {
  double m = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double z = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - m);
    z += out[i];
  }
  for (double& x : out) x /= z;
  return out;
}

CandidatePool generate_candidates(Seq2SeqBackend& backend,
                                  const std::string& handle, const Dataset& d,
                                  const std::string& label,
                                  const AugmentationConfig& cfg,
                                  std::vector<std::string>* warnings) {
  CandidatePool pool;
  pool.label = label;

  auto counts = per_class_counts(d);
  size_t n_y = counts.at(label);
  if (n_y == 0) {
    if (warnings) warnings->push_back("class '" + label + "' has no examples; no candidates generated");
    return pool;
  }
  size_t want = static_cast<size_t>(cfg.alpha()) * n_y;
  std::string prefix = g1_prefix(d.topic, d.verbalize(label));

  uint64_t class_seed = Rng::mix(Rng::mix(cfg.seed, label), "generate");
  auto request = [&](size_t n, uint64_t round) {
    DecodingParams params = cfg.decoding;
    params.seed = Rng::mix(class_seed, round);
    return backend.generate(handle, prefix, params, static_cast<int>(n));
  };

  std::vector<std::string> texts;
  for (const auto& t : request(want, 0)) {
    if (!trim(t).empty()) texts.push_back(t);
  }
  // Degenerate (blank) generations: retry up to 3x the initial deficit.
  size_t allowance = 3 * (want - texts.size());
  uint64_t round = 1;
  while (texts.size() < want && allowance > 0) {
    size_t n = std::min(want - texts.size(), allowance);
    for (const auto& t : request(n, round++)) {
      if (!trim(t).empty() && texts.size() < want) texts.push_back(t);
    }
    allowance -= n;
  }
  if (texts.size() < want && warnings) {
    warnings->push_back("class '" + label + "': only " +
                        std::to_string(texts.size()) + " of " +
                        std::to_string(want) + " candidates after retries");
  }

  if (cfg.dedup) {
    std::vector<std::string> unique;
    for (auto& t : texts) {
      if (std::find(unique.begin(), unique.end(), t) == unique.end()) {
        unique.push_back(std::move(t));
      }
    }
    texts = std::move(unique);
  }

  pool.candidates.reserve(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    ScoredCandidate c;
    c.text = std::move(texts[i]);
    c.label = label;
    c.gen_index = i;
    pool.candidates.push_back(std::move(c));
  }
  return pool;
}

std::map<std::string, std::pair<double, double>> self_check_scores(
    Seq2SeqBackend& backend, const std::string& handle, const std::string& text,
    const Dataset& d, bool length_normalize) {
  if (d.labels.size() < 2) {
    throw ConfigError("self-check requires at least two labels");
  }
  const auto verbalized = d.verbalized_labels();
  // c1 source for the candidate text; the target slot carries each label.
  const std::string source =
      render_c1(text, verbalized, d.topic, verbalized.front()).source;

  std::vector<double> u(d.labels.size());
  for (size_t i = 0; i < d.labels.size(); ++i) {
    u[i] = backend.score_target(handle, source, verbalized[i]);
    if (length_normalize) {
      u[i] /= static_cast<double>(split_words(verbalized[i]).size());
    }
  }
  std::vector<double> q = softmax(u);
  std::map<std::string, std::pair<double, double>> out;
  for (size_t i = 0; i < d.labels.size(); ++i) {
    out[d.labels[i]] = {u[i], q[i]};
  }
  return out;
}

std::vector<ScoredCandidate> select_top(const CandidatePool& pool, size_t keep) {
  std::vector<size_t> order(pool.candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const auto& ca = pool.candidates[a];
    const auto& cb = pool.candidates[b];
    if (ca.q != cb.q) return ca.q > cb.q;
    if (ca.u != cb.u) return ca.u > cb.u;
    return ca.gen_index < cb.gen_index;
  });
  if (order.size() > keep) order.resize(keep);
  std::vector<ScoredCandidate> out;
  out.reserve(order.size());
  for (size_t i : order) out.push_back(pool.candidates[i]);
  return out;
}

StaRunResult run_sta(const Dataset& d, const AugmentationConfig& cfg,
                     Seq2SeqBackend& backend) {
  cfg.validate();
  if (d.examples.empty()) throw ConfigError("cannot augment an empty dataset");

  StaRunResult result;
  result.conversion = convert(d, cfg.family, cfg.seed, cfg.g2_prefix_tokens);

  // Joint training stream: classification and generation pairs interleaved
  // by one global shuffle, not phased.
  std::vector<PromptPair> stream = result.conversion.pairs;
  Rng shuffle_rng(Rng::mix(cfg.seed, "joint_shuffle"));
  shuffle_rng.shuffle(stream);
  result.handle = backend.fine_tune(stream, cfg.fine_tune);

  auto counts = per_class_counts(d);
  std::vector<LabeledExample> generated;
  for (const auto& label : d.labels) {
    size_t n_y = counts[label];
    if (n_y == 0) {
      result.warnings.push_back("class '" + label + "' has no examples; skipped");
      continue;
    }
    CandidatePool pool =
        generate_candidates(backend, result.handle, d, label, cfg, &result.warnings);
    result.realized_alpha[label] = pool.candidates.size();
    size_t keep = std::min(static_cast<size_t>(cfg.beta) * n_y, pool.candidates.size());

    std::vector<size_t> chosen;
    if (cfg.self_check) {
      for (auto& cand : pool.candidates) {
        auto scores = self_check_scores(backend, result.handle, cand.text, d,
                                        cfg.length_normalize_scores);
        cand.q_vector.reserve(d.labels.size());
        for (const auto& l : d.labels) cand.q_vector.push_back(scores[l].second);
        cand.u = scores[label].first;
        cand.q = scores[label].second;
      }
      for (const auto& sel : select_top(pool, keep)) chosen.push_back(sel.gen_index);
    } else {
      std::vector<size_t> indices(pool.candidates.size());
      std::iota(indices.begin(), indices.end(), 0);
      Rng rng(Rng::mix(Rng::mix(cfg.seed, label), "noself_select"));
      rng.shuffle(indices);
      indices.resize(keep);
      // Kept in shuffle order: any prefix of the selection is itself a
      // uniform sample, which the beta-grid reuse in the runner relies on.
      chosen = std::move(indices);
    }

    for (size_t idx : chosen) pool.candidates[idx].selected = true;
    for (size_t idx : chosen) {
      LabeledExample ex;
      ex.text = pool.candidates[idx].text;
      ex.label = label;
      ex.provenance = "generated";
      generated.push_back(std::move(ex));
    }
    result.audit.insert(result.audit.end(), pool.candidates.begin(),
                        pool.candidates.end());
  }

  result.augmented = Dataset::make(d.name + "-aug", d.topic, d.labels,
                                   std::move(generated), d.verbalizations);
  return result;
}

void save_candidate_audit(const std::vector<ScoredCandidate>& audit,
                          const std::filesystem::path& path) {
  std::vector<json> records;
  records.reserve(audit.size());
  for (const auto& c : audit) {
    records.push_back({{"text", c.text},
                       {"label", c.label},
                       {"u", c.u},
                       {"q_vector", c.q_vector},
                       {"selected", c.selected},
                       {"gen_index", c.gen_index}});
  }
  write_jsonl(path, records);
}

}  // namespace sta
