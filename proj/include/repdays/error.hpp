#pragma once

#include <stdexcept>
#include <string>

namespace repdays {

/// Precondition violated by the caller (bad sizes, out-of-range K, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input text that cannot be interpreted at all (missing header, bad schema).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that parses but cannot produce a usable dataset.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failure; the message always carries the path.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(what + ": " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace repdays
