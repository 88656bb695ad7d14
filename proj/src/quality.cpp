#include "sta/quality.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "sta/errors.hpp"
#include "sta/jsonl.hpp"

namespace sta {

namespace {

std::string fold_case(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void count_trigrams(const Dataset& d, size_t* total, std::set<std::string>* seen) {
  for (const auto& ex : d.examples) {
    std::vector<std::string> words = split_words(fold_case(ex.text));
    for (size_t i = 0; i + 2 < words.size(); ++i) {
      ++*total;
      seen->insert(words[i] + " " + words[i + 1] + " " + words[i + 2]);
    }
  }
}

}  // namespace

DiversityScore diversity(const Dataset& original, const Dataset& generated) {
  DiversityScore score;
  std::set<std::string> seen;
  count_trigrams(original, &score.total_trigrams, &seen);
  count_trigrams(generated, &score.total_trigrams, &seen);
  score.unique_trigrams = seen.size();
  if (score.total_trigrams > 0) {
    score.ratio = static_cast<double>(score.unique_trigrams) /
                  static_cast<double>(score.total_trigrams);
  }
  return score;
}

FidelityScore fidelity(const Dataset& generated, Classifier& oracle,
                       const std::string& oracle_handle) {
  if (generated.examples.empty()) {
    throw ConfigError("fidelity requires a non-empty generated set");
  }
  std::vector<std::string> texts;
  texts.reserve(generated.examples.size());
  for (const auto& ex : generated.examples) texts.push_back(ex.text);
  std::vector<std::string> predicted = oracle.predict(oracle_handle, texts);

  FidelityScore score;
  score.n_generated = generated.examples.size();
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == generated.examples[i].label) ++score.n_agree;
  }
  score.accuracy = static_cast<double>(score.n_agree) /
                   static_cast<double>(score.n_generated);
  return score;
}

double classification_accuracy(Classifier& classifier, const std::string& handle,
                               const Dataset& eval_set) {
  if (eval_set.examples.empty()) {
    throw ConfigError("cannot evaluate on an empty dataset");
  }
  std::vector<std::string> texts;
  for (const auto& ex : eval_set.examples) texts.push_back(ex.text);
  std::vector<std::string> predicted = classifier.predict(handle, texts);
  size_t agree = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == eval_set.examples[i].label) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(eval_set.examples.size());
}

std::vector<EvalRow> downstream_eval(const Dataset& train, const Dataset* aug,
                                     const Dataset& test, Classifier& classifier,
                                     const FineTuneParams& params,
                                     const std::vector<uint64_t>& seeds,
                                     const std::string& method, int k) {
  if (seeds.empty()) throw ConfigError("downstream_eval requires at least one seed");
  if (train.labels != test.labels) {
    throw ConfigError("train/test label inventories differ");
  }
  Dataset combined = train;
  if (aug != nullptr) {
    if (aug->labels != train.labels) {
      throw ConfigError("augmentation label inventory differs from train");
    }
    combined.examples.insert(combined.examples.end(), aug->examples.begin(),
                             aug->examples.end());
  }
  std::vector<EvalRow> rows;
  for (uint64_t seed : seeds) {
    FineTuneParams p = params;
    p.seed = seed;
    std::string handle = classifier.train(combined, p);
    rows.push_back({method, k, seed,
                    classification_accuracy(classifier, handle, test)});
  }
  return rows;
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("mean_std of an empty list");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

AggregateRow aggregate(const std::vector<EvalRow>& rows) {
  if (rows.empty()) throw ConfigError("cannot aggregate zero rows");
  std::vector<double> accs;
  for (const auto& r : rows) accs.push_back(r.accuracy);
  auto [mean, stddev] = mean_std(accs);
  AggregateRow agg;
  agg.method = rows.front().method;
  agg.k = rows.front().k;
  agg.mean = mean;
  agg.stddev = stddev;
  agg.n_seeds = rows.size();
  return agg;
}

std::string report_table(const RunReport& report) {
  std::vector<std::string> methods;
  std::vector<int> ks;
  for (const auto& a : report.aggregates) {
    if (std::find(methods.begin(), methods.end(), a.method) == methods.end()) {
      methods.push_back(a.method);
    }
    if (std::find(ks.begin(), ks.end(), a.k) == ks.end()) ks.push_back(a.k);
  }
  std::sort(ks.begin(), ks.end());

  std::ostringstream out;
  out << "method";
  for (int k : ks) out << "\tk=" << k;
  out << "\n";
  for (const auto& m : methods) {
    out << m;
    for (int k : ks) {
      auto it = std::find_if(report.aggregates.begin(), report.aggregates.end(),
                             [&](const AggregateRow& a) {
                               return a.method == m && a.k == k;
                             });
      if (it == report.aggregates.end()) {
        out << "\t-";
      } else {
        char cell[64];
        std::snprintf(cell, sizeof(cell), "\t%.4f (%.4f)", it->mean, it->stddev);
        out << cell;
      }
    }
    out << "\n";
  }
  return out.str();
}

void save_report(const RunReport& report, const std::filesystem::path& path) {
  std::vector<json> records;
  for (const auto& r : report.rows) {
    records.push_back({{"record", "seed"},
                       {"method", r.method},
                       {"k", r.k},
                       {"seed", r.seed},
                       {"accuracy", r.accuracy}});
  }
  for (const auto& a : report.aggregates) {
    json rec = {{"record", "aggregate"}, {"method", a.method}, {"k", a.k},
                {"mean", a.mean},        {"std", a.stddev},    {"n_seeds", a.n_seeds}};
    if (a.chosen_beta) rec["beta"] = *a.chosen_beta;
    if (a.diversity) rec["diversity"] = *a.diversity;
    if (a.fidelity) rec["fidelity"] = *a.fidelity;
    records.push_back(std::move(rec));
  }
  write_jsonl(path, records);
}

RunReport load_report(const std::filesystem::path& path) {
  RunReport report;
  for (const auto& rec : read_jsonl(path)) {
    const std::string kind = rec.at("record").get<std::string>();
    if (kind == "seed") {
      report.rows.push_back({rec.at("method").get<std::string>(),
                             rec.at("k").get<int>(),
                             rec.at("seed").get<uint64_t>(),
                             rec.at("accuracy").get<double>()});
    } else if (kind == "aggregate") {
      AggregateRow a;
      a.method = rec.at("method").get<std::string>();
      a.k = rec.at("k").get<int>();
      a.mean = rec.at("mean").get<double>();
      a.stddev = rec.at("std").get<double>();
      a.n_seeds = rec.at("n_seeds").get<size_t>();
      if (rec.contains("beta")) a.chosen_beta = rec["beta"].get<int>();
      if (rec.contains("diversity")) a.diversity = rec["diversity"].get<double>();
      if (rec.contains("fidelity")) a.fidelity = rec["fidelity"].get<double>();
      report.aggregates.push_back(std::move(a));
    } else {
      throw ConfigError("unknown report record kind '" + kind + "'");
    }
  }
  return report;
}

}  // namespace sta
