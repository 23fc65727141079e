#pragma once

#include <stdexcept>
#include <string>

namespace carigeo {

enum class ErrorKind {
  EmptyInput,
  InvalidParameter,
  DegenerateGeometry,
  NumericalFailure,
  Parse,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput: return "empty input";
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::DegenerateGeometry: return "degenerate geometry";
    case ErrorKind::NumericalFailure: return "numerical failure";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Raised by training when a loss or parameter goes non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, const std::string& what)
      : Error(ErrorKind::NumericalFailure, "diverged at epoch " + std::to_string(epoch) + ": " + what),
        epoch_(epoch) {}

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace carigeo
