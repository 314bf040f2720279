#pragma once

#include <stdexcept>
#include <string>

namespace richpart {

enum class ErrorKind {
  invalid_argument,  // caller violated a precondition
  data,              // malformed or inconsistent input data
  algorithm,         // a pipeline stage could not produce a result
};

/// Library-wide exception. Every error carries the pipeline stage that
/// raised it ("graph", "proximity", "pagerank", "sweep", "forecast", "io",
/// ...) so that the CLI and the HTTP service can report it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message),
        kind_(kind),
        stage_(std::move(stage)),
        message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }
  /// Message without the stage prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string stage_;
  std::string message_;
};

inline Error invalid_argument(std::string stage, const std::string& message) {
  return Error(ErrorKind::invalid_argument, std::move(stage), message);
}

inline Error data_error(std::string stage, const std::string& message) {
  return Error(ErrorKind::data, std::move(stage), message);
}

inline Error algorithm_error(std::string stage, const std::string& message) {
  return Error(ErrorKind::algorithm, std::move(stage), message);
}

}  // namespace richpart
