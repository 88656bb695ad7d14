#include "sta/http_adapter.hpp"

#include <cstdlib>
#include <sstream>

#include <httplib.h>

#include "sta/errors.hpp"
#include "sta/jsonl.hpp"

namespace sta {

namespace {

json decoding_to_json(const DecodingParams& p) {
  return {{"top_k", p.top_k},
          {"top_p", p.top_p},
          {"max_new_tokens", p.max_new_tokens},
          {"seed", p.seed}};
}

DecodingParams decoding_from_json(const json& j) {
  DecodingParams p;
  p.top_k = j.value("top_k", p.top_k);
  p.top_p = j.value("top_p", p.top_p);
  p.max_new_tokens = j.value("max_new_tokens", p.max_new_tokens);
  p.seed = j.value("seed", p.seed);
  return p;
}

json finetune_to_json(const FineTuneParams& p) {
  return {{"learning_rate", p.learning_rate},
          {"epochs", p.epochs},
          {"batch_size", p.batch_size},
          {"warmup_fraction", p.warmup_fraction},
          {"seed", p.seed}};
}

FineTuneParams finetune_from_json(const json& j) {
  FineTuneParams p;
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.epochs = j.value("epochs", p.epochs);
  p.batch_size = j.value("batch_size", p.batch_size);
  p.warmup_fraction = j.value("warmup_fraction", p.warmup_fraction);
  p.seed = j.value("seed", p.seed);
  return p;
}

json post(httplib::Client& client, const std::string& path, const json& body) {
  auto res = client.Post(path, body.dump() + "\n", "application/json");
  if (!res) {
    throw std::runtime_error("adapter request to " + path + " failed: no response");
  }
  if (res->status != 200) {
    throw std::runtime_error("adapter request to " + path + " failed: HTTP " +
                             std::to_string(res->status) + " " + res->body);
  }
  json parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) {
    throw std::runtime_error("adapter response from " + path + " is not JSON");
  }
  return parsed;
}

// Responses for generate/classify are line-delimited records.
std::vector<json> post_lines(httplib::Client& client, const std::string& path,
                             const json& body) {
  auto res = client.Post(path, body.dump() + "\n", "application/json");
  if (!res || res->status != 200) {
    throw std::runtime_error("adapter request to " + path + " failed");
  }
  std::vector<json> records;
  std::istringstream ss(res->body);
  std::string line;
  while (std::getline(ss, line)) {
    if (trim(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      throw std::runtime_error("adapter response line from " + path + " is not JSON");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::filesystem::path temp_record_file(const std::string& stem) {
  auto dir = std::filesystem::temp_directory_path();
  return dir / (stem + "-" + std::to_string(std::rand()) + ".jsonl");
}

}  // namespace

HttpSeq2SeqBackend::HttpSeq2SeqBackend(const std::string& base_url)
    : base_url_(base_url), client_(std::make_unique<httplib::Client>(base_url)) {
  client_->set_read_timeout(600, 0);
}

HttpSeq2SeqBackend::~HttpSeq2SeqBackend() = default;

std::string HttpSeq2SeqBackend::fine_tune(const std::vector<PromptPair>& pairs,
                                          const FineTuneParams& params) {
  params.validate();
  if (pairs.empty()) {
    throw ConfigError("fine_tune requires a non-empty pair sequence");
  }
  auto path = temp_record_file("sta-pairs");
  save_prompt_pairs(pairs, path);
  json res = post(*client_, "/finetune",
                  {{"pairs_path", path.string()}, {"params", finetune_to_json(params)}});
  std::filesystem::remove(path);
  return res.at("handle").get<std::string>();
}

std::vector<std::string> HttpSeq2SeqBackend::generate(const std::string& handle,
                                                      const std::string& prefix,
                                                      const DecodingParams& params,
                                                      int count) {
  params.validate();
  if (count < 1) throw ConfigError("count must be positive");
  auto records = post_lines(*client_, "/generate",
                            {{"handle", handle},
                             {"prefix", prefix},
                             {"params", decoding_to_json(params)},
                             {"count", count}});
  std::vector<std::string> out;
  for (const auto& rec : records) out.push_back(rec.at("text").get<std::string>());
  return out;
}

double HttpSeq2SeqBackend::score_target(const std::string& handle,
                                        const std::string& source,
                                        const std::string& target) {
  json res = post(*client_, "/score",
                  {{"handle", handle}, {"source", source}, {"target", target}});
  return res.at("logprob").get<double>();
}

HttpClassifier::HttpClassifier(const std::string& base_url)
    : base_url_(base_url), client_(std::make_unique<httplib::Client>(base_url)) {
  client_->set_read_timeout(600, 0);
}

HttpClassifier::~HttpClassifier() = default;

std::string HttpClassifier::train(const Dataset& d, const FineTuneParams& params) {
  params.validate();
  auto path = temp_record_file("sta-train");
  save_dataset(d, path, /*write_sidecar=*/true);
  json res = post(*client_, "/train_classifier",
                  {{"dataset_path", path.string()},
                   {"topic", d.topic},
                   {"params", finetune_to_json(params)}});
  std::filesystem::remove(path);
  return res.at("handle").get<std::string>();
}

std::vector<std::string> HttpClassifier::predict(
    const std::string& handle, const std::vector<std::string>& texts) {
  auto records = post_lines(*client_, "/classify",
                            {{"handle", handle}, {"texts", texts}});
  std::vector<std::string> out;
  for (const auto& rec : records) out.push_back(rec.at("label").get<std::string>());
  return out;
}

AdapterServer::AdapterServer(Seq2SeqBackend& backend, Classifier& classifier)
    : backend_(backend), classifier_(classifier),
      server_(std::make_unique<httplib::Server>()) {
  auto handle_errors = [](auto fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        json body = json::parse(req.body);
        fn(body, res);
      } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(json({{"error", e.what()}}).dump() + "\n", "application/json");
      }
    };
  };

  server_->Post("/finetune", handle_errors([this](const json& body, httplib::Response& res) {
    auto pairs = load_prompt_pairs(body.at("pairs_path").get<std::string>());
    std::string handle = backend_.fine_tune(pairs, finetune_from_json(body.at("params")));
    res.set_content(json({{"handle", handle}}).dump() + "\n", "application/json");
  }));

  server_->Post("/generate", handle_errors([this](const json& body, httplib::Response& res) {
    auto texts = backend_.generate(body.at("handle").get<std::string>(),
                                   body.at("prefix").get<std::string>(),
                                   decoding_from_json(body.at("params")),
                                   body.at("count").get<int>());
    std::string out;
    for (const auto& t : texts) out += json({{"text", t}}).dump() + "\n";
    res.set_content(out, "application/json");
  }));

  server_->Post("/score", handle_errors([this](const json& body, httplib::Response& res) {
    double lp = backend_.score_target(body.at("handle").get<std::string>(),
                                      body.at("source").get<std::string>(),
                                      body.at("target").get<std::string>());
    res.set_content(json({{"logprob", lp}}).dump() + "\n", "application/json");
  }));

  server_->Post("/train_classifier", handle_errors([this](const json& body, httplib::Response& res) {
    Dataset d = load_dataset(body.at("dataset_path").get<std::string>(),
                             body.value("topic", std::string()));
    std::string handle = classifier_.train(d, finetune_from_json(body.at("params")));
    res.set_content(json({{"handle", handle}}).dump() + "\n", "application/json");
  }));

  server_->Post("/classify", handle_errors([this](const json& body, httplib::Response& res) {
    auto labels = classifier_.predict(body.at("handle").get<std::string>(),
                                      body.at("texts").get<std::vector<std::string>>());
    std::string out;
    for (const auto& l : labels) out += json({{"label", l}}).dump() + "\n";
    res.set_content(out, "application/json");
  }));
}

AdapterServer::~AdapterServer() { stop(); }

int AdapterServer::start(int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port("127.0.0.1");
  } else if (!server_->bind_to_port("127.0.0.1", port)) {
    throw std::runtime_error("cannot bind adapter server to port " + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void AdapterServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace sta
