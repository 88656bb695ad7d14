#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace sta {

using json = nlohmann::ordered_json;

// Line-delimited JSON I/O. Every dataset, prompt-pair, candidate and report
// file in this project is UTF-8 with one JSON object per line.

// Parses every non-blank line. Throws ConfigError naming the 1-based line
// number on a malformed record.
std::vector<json> read_jsonl(const std::filesystem::path& path);

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace sta
