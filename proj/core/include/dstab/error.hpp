#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Positions are 1-based; line is 0 when the input had
/// no line structure (a single expression).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(format(what, line, column)), message_(what), line_(line), column_(column) {}

  /// The message without position prefix.
  const std::string& message() const { return message_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line,
                            std::size_t column) {
    if (line == 0) return "column " + std::to_string(column) + ": " + what;
    return "line " + std::to_string(line) + ", column " +
           std::to_string(column) + ": " + what;
  }

  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace dstab
