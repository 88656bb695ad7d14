#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sta/backend.hpp"
#include "sta/corpus.hpp"
#include "sta/templates.hpp"

namespace sta {

struct AugmentationConfig {
  int beta = 1;               // augmentation factor, selected per class
  int alpha_multiplier = 5;   // candidates generated per selected example
  TemplateFamily family = TemplateFamily::full();
  bool self_check = true;     // off = the no-self-check ablation
  bool dedup = false;         // drop duplicate generations before selection
  bool length_normalize_scores = false;  // divide u by target token count
  int g2_prefix_tokens = 3;
  DecodingParams decoding;
  FineTuneParams fine_tune;
  uint64_t seed = 0;

  int alpha() const { return alpha_multiplier * beta; }
  void validate() const;
};

struct ScoredCandidate {
  std::string text;
  std::string label;                  // the class whose prefix produced it
  double u = 0.0;                     // raw log-prob score for `label`
  double q = 0.0;                     // softmax-normalized confidence
  std::vector<double> q_vector;       // q over the full inventory order
  bool selected = false;
  size_t gen_index = 0;               // generation order within the pool
};

struct CandidatePool {
  std::string label;
  std::vector<ScoredCandidate> candidates;
};

struct StaRunResult {
  Dataset augmented;                       // D*, generated examples only
  std::vector<ScoredCandidate> audit;      // every candidate, with flags
  std::map<std::string, size_t> realized_alpha;  // per class, after retries
  std::vector<std::string> warnings;
  std::string handle;                      // fine-tuned backend handle
  ConvertResult conversion;                // the D_t that trained the backend
};

// Full pipeline for one dataset: convert to D_t, fine-tune, generate
// alpha*n_y candidates per class from the g1 prefix, self-check with the c1
// score, keep the top beta*n_y (or a uniform seeded sample when self_check
// is off), and assemble D*.
StaRunResult run_sta(const Dataset& d, const AugmentationConfig& cfg,
                     Seq2SeqBackend& backend);

// Decodes alpha*n_y texts from the g1 prefix for `label`. Empty or
// whitespace-only generations are regenerated up to 3x the deficit, then
// dropped with a warning recorded in `warnings`.
CandidatePool generate_candidates(Seq2SeqBackend& backend,
                                  const std::string& handle, const Dataset& d,
                                  const std::string& label,
                                  const AugmentationConfig& cfg,
                                  std::vector<std::string>* warnings = nullptr);

// u(l) = score of each verbalized label as the c1 target for `text`;
// q = softmax over the u values. Keys follow the inventory order of `d`.
std::map<std::string, std::pair<double, double>> self_check_scores(
    Seq2SeqBackend& backend, const std::string& handle, const std::string& text,
    const Dataset& d, bool length_normalize = false);

// Top `keep` candidates by (q desc, u desc, generation order asc). Returns
// all candidates when the pool is short.
std::vector<ScoredCandidate> select_top(const CandidatePool& pool, size_t keep);

// Numerically stable softmax.
std::vector<double> softmax(const std::vector<double>& scores);

void save_candidate_audit(const std::vector<ScoredCandidate>& audit,
                          const std::filesystem::path& path);

}  // namespace sta
