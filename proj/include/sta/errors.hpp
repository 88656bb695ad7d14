#pragma once

#include <stdexcept>
#include <string>

namespace sta {

// Usage / configuration / bad-input problems. The CLI maps these to exit
// code 2; everything else that escapes is a runtime failure (exit 1).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sta
