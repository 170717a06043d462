#pragma once

#include <stdexcept>
#include <string>

namespace jsvqa {

// Bad run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or invalid instance file (CLI exit code 3).
struct InstanceError : std::runtime_error {
  explicit InstanceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jsvqa
