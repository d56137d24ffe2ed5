#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace teamportrait {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input record. `line()` is 1-based; 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid configuration: alias cycles, bad thresholds, unknown config keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the data does not hold (empty document, unknown leader, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// File system failure, always carrying the offending path.
class IoError : public Error {
 public:
  IoError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A required input file or upstream artifact does not exist.
class MissingFileError : public IoError {
 public:
  explicit MissingFileError(const std::string& path) : IoError(path, "required file is missing") {}
};

}  // namespace teamportrait
