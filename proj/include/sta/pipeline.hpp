#pragma once

#include <memory>

#include "sta/config.hpp"
#include "sta/http_adapter.hpp"
#include "sta/mock_backend.hpp"
#include "sta/quality.hpp"

namespace sta {

// Owns whichever backend/classifier the config selects and exposes the
// contract pointers the stages work through.
struct BackendBundle {
  std::unique_ptr<Seq2SeqBackend> backend_owner;
  std::unique_ptr<Classifier> classifier_owner;
  Seq2SeqBackend* backend = nullptr;
  Classifier* classifier = nullptr;
};

BackendBundle make_backends(const ExperimentConfig& cfg);

// Directory holding the intermediates of one (k, seed) run.
std::filesystem::path run_dir(const ExperimentConfig& cfg, int k, uint64_t seed);

// Stages. Each persists its outputs under the run directory and is skipped
// when the output file already exists, so an interrupted pipeline resumes
// from the last completed stage.
Dataset stage_kshot(const ExperimentConfig& cfg, const Dataset& train, int k,
                    uint64_t seed);
Dataset stage_augment(const ExperimentConfig& cfg, const Dataset& kshot, int k,
                      uint64_t seed, Seq2SeqBackend& backend);

// The beta-grid subset of the full-beta augmentation: per-class prefixes of
// the persisted selection ranking (per-example variant prefixes for EDA).
Dataset beta_subset(const ExperimentConfig& cfg, const Dataset& kshot,
                    const Dataset& d_star_full, int beta);

struct RunOutcome {
  int k = 0;
  uint64_t seed = 0;
  int chosen_beta = 1;
  double test_accuracy = 0.0;
  std::optional<double> dev_accuracy;
  std::optional<double> diversity_ratio;
  std::optional<double> fidelity_accuracy;
};

// CLI entry points. All throw ConfigError for usage problems; the CLI maps
// exceptions to exit codes.
void cmd_convert(const ExperimentConfig& cfg);
void cmd_finetune(const ExperimentConfig& cfg);
void cmd_augment(const ExperimentConfig& cfg);
void cmd_evaluate(const ExperimentConfig& cfg);
void cmd_pipeline(const ExperimentConfig& cfg);

}  // namespace sta
