#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sta/corpus.hpp"
#include "sta/templates.hpp"

namespace sta {

struct DecodingParams {
  int top_k = 40;
  double top_p = 1.0;
  int max_new_tokens = 64;
  uint64_t seed = 0;

  void validate() const;
};

struct FineTuneParams {
  double learning_rate = 5e-5;
  int epochs = 32;
  int batch_size = 16;
  double warmup_fraction = 0.0;  // in [0, 1)
  uint64_t seed = 0;

  void validate() const;
};

// Boundary to a sequence-to-sequence generator/scorer. fine_tune returns an
// opaque handle id; generate and score operate on the fine-tuned state only.
class Seq2SeqBackend {
 public:
  virtual ~Seq2SeqBackend() = default;

  virtual std::string name() const = 0;

  // pairs must be non-empty; classification and generation pairs are one
  // joint training stream.
  virtual std::string fine_tune(const std::vector<PromptPair>& pairs,
                                const FineTuneParams& params) = 0;

  // Returns exactly `count` completions (duplicates permitted), continuation
  // only, each truncated at max_new_tokens. Per step, sampling is restricted
  // to the top_k most probable tokens intersected with the minimal top_p
  // nucleus.
  virtual std::vector<std::string> generate(const std::string& handle,
                                            const std::string& prefix,
                                            const DecodingParams& params,
                                            int count) = 0;

  // log p(target | source): sum of per-token conditional log-probabilities
  // of the fixed target sequence. Sampling-free, repeat calls identical.
  virtual double score_target(const std::string& handle,
                              const std::string& source,
                              const std::string& target) = 0;
};

// Boundary to a downstream text classifier.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::string name() const = 0;
  virtual std::string train(const Dataset& d, const FineTuneParams& params) = 0;
  // Every prediction is a label from the training inventory.
  virtual std::vector<std::string> predict(const std::string& handle,
                                           const std::vector<std::string>& texts) = 0;
};

// Indices into `probs` that survive top-k / top-p filtering, in descending
// probability order (ties by lower index). The nucleus is the minimal
// prefix of the sorted distribution whose mass reaches top_p; the result is
// its intersection with the top_k most probable tokens, never empty.
std::vector<size_t> top_k_top_p_filter(const std::vector<double>& probs,
                                       int top_k, double top_p);

}  // namespace sta
