#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "sta/backend.hpp"

namespace sta {

// Deterministic in-process stand-in for a pretrained seq2seq model. Training
// builds count statistics from the prompt pairs (target bigrams plus
// source-token / target-token co-occurrence), and decoding/scoring use the
// resulting smoothed conditional distribution. The distribution is proper:
// at every step the probabilities over vocabulary + end-of-sequence sum to 1,
// so teacher-forced scores behave like real log-likelihoods, and fine-tuning
// on the c1/g1 pairs genuinely couples labels with class vocabulary.
class MockSeq2SeqBackend : public Seq2SeqBackend {
 public:
  std::string name() const override { return "mock"; }

  std::string fine_tune(const std::vector<PromptPair>& pairs,
                        const FineTuneParams& params) override;

  std::vector<std::string> generate(const std::string& handle,
                                    const std::string& prefix,
                                    const DecodingParams& params,
                                    int count) override;

  double score_target(const std::string& handle, const std::string& source,
                      const std::string& target) override;

  // Per-step conditional distribution over (vocabulary incl. "</s>"), for
  // inspecting the candidate sets the sampler filters. `prev` empty means
  // begin-of-sequence.
  std::vector<std::pair<std::string, double>> next_token_distribution(
      const std::string& handle, const std::string& source,
      const std::string& prev) const;

  struct CallStats {
    size_t fine_tune_calls = 0;
    size_t generate_calls = 0;
    size_t score_calls = 0;
  };
  CallStats stats() const;
  void reset_stats();

  static constexpr const char* kEos = "</s>";

 private:
  struct Model {
    std::vector<std::string> vocab;  // index 0 is EOS
    std::map<std::string, int> index;
    std::map<int, std::map<int, double>> bigram;  // prev (-1 = BOS) -> token
    std::map<int, std::map<int, double>> cooc;    // source token -> target token
  };

  std::shared_ptr<const Model> find(const std::string& handle) const;

  // Weights over the vocabulary for one decoding step; returns the
  // normalizer so out-of-vocabulary tokens can be priced at smoothing mass.
  static std::vector<double> step_weights(const Model& m,
                                          const std::vector<int>& source_ids,
                                          int prev, double* normalizer);

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Model>> models_;
  mutable std::atomic<size_t> fine_tune_calls_{0};
  mutable std::atomic<size_t> generate_calls_{0};
  mutable std::atomic<size_t> score_calls_{0};
};

// Test/oracle classifier: memorizes exact training texts and falls back to
// the majority training label (ties broken by inventory order).
class MockClassifier : public Classifier {
 public:
  std::string name() const override { return "mock"; }

  std::string train(const Dataset& d, const FineTuneParams& params) override;
  std::vector<std::string> predict(const std::string& handle,
                                   const std::vector<std::string>& texts) override;

 private:
  struct Model {
    std::map<std::string, std::string> memo;
    std::string majority;
  };
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Model>> models_;
};

}  // namespace sta
