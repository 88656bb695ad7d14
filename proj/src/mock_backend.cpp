#include "sta/mock_backend.hpp"

#include <cmath>
#include <cstdio>

#include "sta/errors.hpp"
#include "sta/rng.hpp"

namespace sta {

namespace {

constexpr double kSmoothing = 0.01;

uint64_t fnv1a(uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  h ^= 0x1E;  // record separator
  h *= 0x100000001B3ULL;
  return h;
}

std::string hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string MockSeq2SeqBackend::fine_tune(const std::vector<PromptPair>& pairs,
                                          const FineTuneParams& params) {
  params.validate();
  if (pairs.empty()) {
    throw ConfigError("fine_tune requires a non-empty pair sequence");
  }
  ++fine_tune_calls_;

  auto model = std::make_shared<Model>();
  model->vocab.push_back(kEos);
  model->index[kEos] = 0;
  auto intern = [&](const std::string& tok) {
    auto [it, inserted] = model->index.try_emplace(tok, static_cast<int>(model->vocab.size()));
    if (inserted) model->vocab.push_back(tok);
    return it->second;
  };

  uint64_t fp = 0xCBF29CE484222325ULL;
  for (const auto& p : pairs) {
    fp = fnv1a(fp, p.source);
    fp = fnv1a(fp, p.target);
    fp = fnv1a(fp, to_string(p.template_id));

    std::vector<int> src;
    for (const auto& w : split_words(p.source)) src.push_back(intern(w));
    std::vector<int> tgt;
    for (const auto& w : split_words(p.target)) tgt.push_back(intern(w));
    tgt.push_back(0);  // EOS terminates every target

    int prev = -1;
    for (int t : tgt) {
      model->bigram[prev][t] += 1.0;
      if (!src.empty()) {
        double share = 1.0 / static_cast<double>(src.size());
        for (int s : src) model->cooc[s][t] += share;
      }
      prev = t;
    }
  }
  fp = fnv1a(fp, std::to_string(params.epochs));
  fp = fnv1a(fp, std::to_string(params.batch_size));
  fp = fnv1a(fp, std::to_string(params.seed));

  std::string handle = "mock-" + hex(fp);
  std::lock_guard<std::mutex> lock(mu_);
  models_[handle] = std::move(model);
  return handle;
}

std::shared_ptr<const MockSeq2SeqBackend::Model> MockSeq2SeqBackend::find(
    const std::string& handle) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = models_.find(handle);
  if (it == models_.end()) {
    throw ConfigError("unknown backend handle '" + handle + "'");
  }
  return it->second;
}

std::vector<double> MockSeq2SeqBackend::step_weights(
    const Model& m, const std::vector<int>& source_ids, int prev,
    double* normalizer) {
  std::vector<double> w(m.vocab.size(), kSmoothing);
  auto big = m.bigram.find(prev);
  if (big != m.bigram.end()) {
    for (const auto& [tok, c] : big->second) w[tok] += c;
  }
  if (!source_ids.empty()) {
    double share = 1.0 / static_cast<double>(source_ids.size());
    for (int s : source_ids) {
      auto it = m.cooc.find(s);
      if (it == m.cooc.end()) continue;
      for (const auto& [tok, c] : it->second) w[tok] += c * share;
    }
  }
  double z = 0.0;
  for (double x : w) z += x;
  if (normalizer) *normalizer = z;
  return w;
}

std::vector<std::string> MockSeq2SeqBackend::generate(const std::string& handle,
                                                      const std::string& prefix,
                                                      const DecodingParams& params,
                                                      int count) {
  params.validate();
  if (count < 1) throw ConfigError("count must be positive");
  if (trim(prefix).empty()) throw ConfigError("generation prefix must be non-empty");
  ++generate_calls_;

  auto model = find(handle);
  std::vector<int> src;
  for (const auto& w : split_words(prefix)) {
    auto it = model->index.find(w);
    if (it != model->index.end()) src.push_back(it->second);
  }

  Rng rng(Rng::mix(Rng::mix(params.seed, handle), prefix));
  std::vector<std::string> completions;
  completions.reserve(static_cast<size_t>(count));
  for (int c = 0; c < count; ++c) {
    std::vector<std::string> out_tokens;
    int prev = -1;
    for (int step = 0; step < params.max_new_tokens; ++step) {
      double z = 0.0;
      std::vector<double> w = step_weights(*model, src, prev, &z);
      std::vector<double> probs(w.size());
      for (size_t i = 0; i < w.size(); ++i) probs[i] = w[i] / z;

      std::vector<size_t> allowed = top_k_top_p_filter(probs, params.top_k, params.top_p);
      double mass = 0.0;
      for (size_t i : allowed) mass += probs[i];
      double r = rng.unit() * mass;
      size_t pick = allowed.back();
      for (size_t i : allowed) {
        r -= probs[i];
        if (r <= 0.0) {
          pick = i;
          break;
        }
      }
      if (pick == 0) break;  // EOS
      out_tokens.push_back(model->vocab[pick]);
      prev = static_cast<int>(pick);
    }
    completions.push_back(join_words(out_tokens));
  }
  return completions;
}

double MockSeq2SeqBackend::score_target(const std::string& handle,
                                        const std::string& source,
                                        const std::string& target) {
  ++score_calls_;
  auto model = find(handle);
  std::vector<std::string> tgt = split_words(target);
  if (tgt.empty()) throw ConfigError("score_target requires a non-empty target");

  std::vector<int> src;
  for (const auto& w : split_words(source)) {
    auto it = model->index.find(w);
    if (it != model->index.end()) src.push_back(it->second);
  }

  double logprob = 0.0;
  int prev = -1;
  for (const auto& tok : tgt) {
    double z = 0.0;
    std::vector<double> w = step_weights(*model, src, prev, &z);
    auto it = model->index.find(tok);
    if (it != model->index.end()) {
      logprob += std::log(w[it->second] / z);
      prev = it->second;
    } else {
      // Out-of-vocabulary: priced as one extra smoothing-mass entry.
      logprob += std::log(kSmoothing / (z + kSmoothing));
      prev = -1;
    }
  }
  return logprob;
}

std::vector<std::pair<std::string, double>>
MockSeq2SeqBackend::next_token_distribution(const std::string& handle,
                                            const std::string& source,
                                            const std::string& prev) const {
  auto model = find(handle);
  std::vector<int> src;
  for (const auto& w : split_words(source)) {
    auto it = model->index.find(w);
    if (it != model->index.end()) src.push_back(it->second);
  }
  int prev_id = -1;
  if (!prev.empty()) {
    auto it = model->index.find(prev);
    if (it != model->index.end()) prev_id = it->second;
  }
  double z = 0.0;
  std::vector<double> w = step_weights(*model, src, prev_id, &z);
  std::vector<std::pair<std::string, double>> dist;
  dist.reserve(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    dist.emplace_back(model->vocab[i], w[i] / z);
  }
  return dist;
}

MockSeq2SeqBackend::CallStats MockSeq2SeqBackend::stats() const {
  return {fine_tune_calls_.load(), generate_calls_.load(), score_calls_.load()};
}

void MockSeq2SeqBackend::reset_stats() {
  fine_tune_calls_ = 0;
  generate_calls_ = 0;
  score_calls_ = 0;
}

std::string MockClassifier::train(const Dataset& d, const FineTuneParams& params) {
  params.validate();
  if (d.examples.empty()) {
    throw ConfigError("classifier training requires a non-empty dataset");
  }
  auto model = std::make_shared<Model>();
  uint64_t fp = 0xCBF29CE484222325ULL;
  auto counts = per_class_counts(d);
  for (const auto& ex : d.examples) {
    model->memo[ex.text] = ex.label;
    fp = fnv1a(fp, ex.text);
    fp = fnv1a(fp, ex.label);
  }
  size_t best = 0;
  for (const auto& label : d.labels) {  // ties go to inventory order
    if (counts[label] > best) {
      best = counts[label];
      model->majority = label;
    }
  }
  fp = fnv1a(fp, std::to_string(params.seed));
  std::string handle = "mockclf-" + hex(fp);
  std::lock_guard<std::mutex> lock(mu_);
  models_[handle] = std::move(model);
  return handle;
}

std::vector<std::string> MockClassifier::predict(
    const std::string& handle, const std::vector<std::string>& texts) {
  std::shared_ptr<const Model> model;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = models_.find(handle);
    if (it == models_.end()) {
      throw ConfigError("unknown classifier handle '" + handle + "'");
    }
    model = it->second;
  }
  std::vector<std::string> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = model->memo.find(t);
    out.push_back(it != model->memo.end() ? it->second : model->majority);
  }
  return out;
}

}  // namespace sta
