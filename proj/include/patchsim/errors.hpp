#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace patchsim {

/// Root of every error raised by the toolchain.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw trace violates enter/exit nesting.
class MalformedTrace : public Error {
 public:
  using Error::Error;
};

/// Trace wire format could not be decoded.
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Both inputs exceed the configured LCS length cap and subsampling is off.
class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

class NoCoveringOriginals : public Error {
 public:
  using Error::Error;
};

class EmptyVector : public Error {
 public:
  using Error::Error;
};

class NoFailingTests : public Error {
 public:
  using Error::Error;
};

class MissingTrace : public Error {
 public:
  using Error::Error;
};

class EmptyCoveringSet : public Error {
 public:
  using Error::Error;
};

/// Mini-language source could not be parsed.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Manifest is structurally invalid.
class ManifestError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace patchsim
