#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sta/backend.hpp"
#include "sta/corpus.hpp"

namespace sta {

struct DiversityScore {
  size_t unique_trigrams = 0;
  size_t total_trigrams = 0;
  std::optional<double> ratio;  // absent when the population has no trigrams
};

struct FidelityScore {
  size_t n_generated = 0;
  size_t n_agree = 0;
  double accuracy = 0.0;
};

struct EvalRow {
  std::string method;
  int k = 0;
  uint64_t seed = 0;
  double accuracy = 0.0;
};

struct AggregateRow {
  std::string method;
  int k = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n-1)
  size_t n_seeds = 0;
  std::optional<int> chosen_beta;
  std::optional<double> diversity;
  std::optional<double> fidelity;
};

struct RunReport {
  std::vector<EvalRow> rows;
  std::vector<AggregateRow> aggregates;
};

// Unique word trigrams over total trigrams in original + generated. Trigrams
// are consecutive triples of case-folded whitespace tokens, counted within
// each text (never across texts).
DiversityScore diversity(const Dataset& original, const Dataset& generated);

// Agreement between the oracle classifier's predictions on the generated
// texts and their assigned labels. The oracle should have been trained on
// the full original training data.
FidelityScore fidelity(const Dataset& generated, Classifier& oracle,
                       const std::string& oracle_handle);

// Fraction of `eval_set` texts the classifier labels correctly.
double classification_accuracy(Classifier& classifier, const std::string& handle,
                               const Dataset& eval_set);

// Per seed: train on train (+ aug when present), measure test accuracy.
std::vector<EvalRow> downstream_eval(const Dataset& train,
                                     const Dataset* aug,
                                     const Dataset& test,
                                     Classifier& classifier,
                                     const FineTuneParams& params,
                                     const std::vector<uint64_t>& seeds,
                                     const std::string& method, int k);

// (mean, sample std with n-1 denominator; std = 0 for a single value)
std::pair<double, double> mean_std(const std::vector<double>& values);

AggregateRow aggregate(const std::vector<EvalRow>& rows);

// "mean (std)" grid, one row per method, one column per k; absent cells
// render as "-".
std::string report_table(const RunReport& report);

void save_report(const RunReport& report, const std::filesystem::path& path);
RunReport load_report(const std::filesystem::path& path);

}  // namespace sta
