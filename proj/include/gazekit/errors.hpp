#pragma once

#include <stdexcept>
#include <string>

namespace gazekit {

/// Input data (session, responses, results files) failed validation.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A test script or analysis configuration is inconsistent.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gazekit
