#include <chrono>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "sta/errors.hpp"
#include "sta/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string backend;
  uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Experiment config file (JSON)")
      ->required();
  cmd->add_option("--out", flags.out_dir, "Output directory (overrides config)");
  cmd->add_option("--backend", flags.backend,
                  "Backend: mock | external:<endpoint> (overrides config)");
  cmd->add_option("--seed", flags.seed, "Single run seed (overrides config seeds)")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
}

sta::ExperimentConfig resolve(const CommonFlags& flags) {
  sta::ExperimentConfig cfg = sta::ExperimentConfig::from_file(flags.config_path);
  cfg.apply_environment();
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.backend.empty()) cfg.backend_spec = flags.backend;
  if (flags.seed_set) cfg.seeds = {flags.seed};
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-controlled text augmentation toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* convert = app.add_subcommand("convert", "Convert a dataset to prompt pairs (D_t)");
  auto* finetune = app.add_subcommand("finetune", "Convert and fine-tune the backend");
  auto* augment = app.add_subcommand("augment", "Generate and select augmented data (D*)");
  auto* evaluate = app.add_subcommand("evaluate", "Downstream accuracy, diversity and fidelity");
  auto* pipeline = app.add_subcommand("pipeline", "k-shot sample, convert, fine-tune, augment, evaluate");
  for (auto* cmd : {convert, finetune, augment, evaluate, pipeline}) {
    add_common(cmd, flags);
  }

  auto* serve = app.add_subcommand("serve-mock", "Serve the mock backend over the adapter protocol");
  int serve_port = 8734;
  serve->add_option("--port", serve_port, "Port to listen on");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (serve->parsed()) {
      sta::MockSeq2SeqBackend backend;
      sta::MockClassifier classifier;
      sta::AdapterServer server(backend, classifier);
      int port = server.start(serve_port);
      std::cout << "mock backend serving on 127.0.0.1:" << port << std::endl;
      for (;;) std::this_thread::sleep_for(std::chrono::seconds(3600));
    }
    sta::ExperimentConfig cfg = resolve(flags);
    if (convert->parsed()) sta::cmd_convert(cfg);
    else if (finetune->parsed()) sta::cmd_finetune(cfg);
    else if (augment->parsed()) sta::cmd_augment(cfg);
    else if (evaluate->parsed()) sta::cmd_evaluate(cfg);
    else if (pipeline->parsed()) sta::cmd_pipeline(cfg);
  } catch (const sta::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
