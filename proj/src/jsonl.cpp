#include "sta/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "sta/errors.hpp"

namespace sta {

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open file: " + path.string());
  }
  std::vector<json> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": malformed record");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write file: " + path.string());
  }
  for (const auto& rec : records) {
    out << rec.dump() << '\n';
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open file: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write file: " + path.string());
  }
  out << content;
}

}  // namespace sta
