#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sta/backend.hpp"
#include "sta/corpus.hpp"

namespace sta::test {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    path_ = base / ("sta-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline Dataset tiny_sentiment(int per_class = 3) {
  std::vector<LabeledExample> examples;
  const char* pos[] = {"a fine film with heart", "great story and acting",
                       "warm and funny picture", "a joy from start to finish",
                       "simply wonderful work"};
  const char* neg[] = {"a dull and tired movie", "boring plot and flat acting",
                       "a mess of bad ideas", "tedious from start to finish",
                       "plainly awful work"};
  for (int i = 0; i < per_class; ++i) {
    examples.push_back({pos[i % 5], "positive", ""});
    examples.push_back({neg[i % 5], "negative", ""});
  }
  return Dataset::make("tiny", "sentiment", {"negative", "positive"}, examples);
}

// Backend with pre-scripted outputs, for pinning exact pipeline behavior.
class ScriptedBackend : public Seq2SeqBackend {
 public:
  std::string name() const override { return "scripted"; }

  void script_generations(std::vector<std::string> texts, bool cycle = false) {
    script_ = std::move(texts);
    pos_ = 0;
    cycle_ = cycle;
  }
  void script_score(const std::string& source, const std::string& target,
                    std::vector<double> token_logprobs) {
    scores_[source + "\x1f" + target] = std::move(token_logprobs);
  }
  void set_default_score(double v) { default_score_ = v; }

  std::string fine_tune(const std::vector<PromptPair>& pairs,
                        const FineTuneParams& params) override {
    params.validate();
    if (pairs.empty()) throw std::invalid_argument("empty pairs");
    trained_pairs_ = pairs;
    ++fine_tune_calls;
    return "scripted-" + std::to_string(fine_tune_calls);
  }

  std::vector<std::string> generate(const std::string& /*handle*/,
                                    const std::string& prefix,
                                    const DecodingParams& params, int count) override {
    params.validate();
    if (count < 1) throw std::invalid_argument("count must be positive");
    ++generate_calls;
    prefixes.push_back(prefix);
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i) {
      if (pos_ >= script_.size()) {
        if (!cycle_ || script_.empty()) {
          throw std::runtime_error("scripted generations exhausted");
        }
        pos_ = 0;
      }
      out.push_back(script_[pos_++]);
    }
    return out;
  }

  double score_target(const std::string& /*handle*/, const std::string& source,
                      const std::string& target) override {
    ++score_calls;
    auto it = scores_.find(source + "\x1f" + target);
    if (it == scores_.end()) return default_score_;
    double sum = 0.0;
    for (double lp : it->second) sum += lp;
    return sum;
  }

  std::vector<PromptPair> trained_pairs_;
  std::vector<std::string> prefixes;
  size_t fine_tune_calls = 0;
  size_t generate_calls = 0;
  size_t score_calls = 0;

 private:
  std::vector<std::string> script_;
  size_t pos_ = 0;
  bool cycle_ = false;
  std::map<std::string, std::vector<double>> scores_;
  double default_score_ = -1.0;
};

}  // namespace sta::test
