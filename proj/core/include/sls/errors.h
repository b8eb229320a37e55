#pragma once

#include <stdexcept>
#include <string>

namespace sls {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or parameter values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An event arrived with a timestamp earlier than one already processed.
class ClockError : public Error {
 public:
  using Error::Error;
};

// Readings or hypotheses that do not belong to the frame of discernment,
// or mass functions defined over different frames.
class FrameError : public Error {
 public:
  using Error::Error;
};

// Dempster combination of two totally conflicting mass functions.
class ConflictError : public Error {
 public:
  using Error::Error;
};

// Text input that fails to parse. line/column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error(Describe(line, column, message)),
        line_(line),
        column_(column),
        message_(message) {}

  int line() const { return line_; }
  int column() const { return column_; }
  // Message without the position prefix.
  const std::string& message() const { return message_; }

 private:
  static std::string Describe(int line, int column, const std::string& message) {
    if (line == 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
           message;
  }

  int line_;
  int column_;
  std::string message_;
};

}  // namespace sls
