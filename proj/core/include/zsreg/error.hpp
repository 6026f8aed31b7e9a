#pragma once

#include <stdexcept>
#include <string>

namespace zsreg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or argument contract violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// CSV / JSON ingestion failure. The message names the file and line.
class LoadError : public Error {
 public:
  LoadError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Experiment configuration failure. line() is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line), message_(what) {}

  std::size_t line() const noexcept { return line_; }
  /// The message without the line prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::string message_;
};

}  // namespace zsreg
