#pragma once

#include <memory>
#include <string>
#include <thread>

#include "sta/backend.hpp"

namespace httplib {
class Server;
class Client;
}  // namespace httplib

namespace sta {

// Client side of the adapter protocol. Talks to an external model runtime
// over HTTP so the core never links model libraries directly.
//
// Endpoints (all POST, JSON request body, JSON or JSONL response):
//   /finetune  {"pairs_path", "params"}                  -> {"handle"}
//   /generate  {"handle", "prefix", "params", "count"}   -> lines {"text"}
//   /score     {"handle", "source", "target"}            -> {"logprob"}
//   /train_classifier {"dataset_path", "params"}         -> {"handle"}
//   /classify  {"handle", "texts"}                       -> lines {"label"}
class HttpSeq2SeqBackend : public Seq2SeqBackend {
 public:
  explicit HttpSeq2SeqBackend(const std::string& base_url);
  ~HttpSeq2SeqBackend() override;

  std::string name() const override { return "external:" + base_url_; }
  std::string fine_tune(const std::vector<PromptPair>& pairs,
                        const FineTuneParams& params) override;
  std::vector<std::string> generate(const std::string& handle,
                                    const std::string& prefix,
                                    const DecodingParams& params,
                                    int count) override;
  double score_target(const std::string& handle, const std::string& source,
                      const std::string& target) override;

 private:
  std::string base_url_;
  std::unique_ptr<httplib::Client> client_;
};

class HttpClassifier : public Classifier {
 public:
  explicit HttpClassifier(const std::string& base_url);
  ~HttpClassifier() override;

  std::string name() const override { return "external:" + base_url_; }
  std::string train(const Dataset& d, const FineTuneParams& params) override;
  std::vector<std::string> predict(const std::string& handle,
                                   const std::vector<std::string>& texts) override;

 private:
  std::string base_url_;
  std::unique_ptr<httplib::Client> client_;
};

// Serves an in-process backend/classifier pair over the adapter protocol.
// Used by `sta serve-mock` and by the adapter round-trip tests.
class AdapterServer {
 public:
  AdapterServer(Seq2SeqBackend& backend, Classifier& classifier);
  ~AdapterServer();

  // Binds to an ephemeral port on 127.0.0.1 (or `port` if nonzero) and
  // serves on a background thread. Returns the bound port.
  int start(int port = 0);
  void stop();

 private:
  Seq2SeqBackend& backend_;
  Classifier& classifier_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace sta
