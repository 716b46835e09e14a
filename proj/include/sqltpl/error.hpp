#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sqltpl {

enum class ErrorCode {
  // lexer
  UnterminatedString,
  UnterminatedComment,
  EmptyInput,
  MultipleStatements,
  // schema
  ParseError,
  DuplicateTable,
  EmptyCatalog,
  // templatizer
  WrongLevel,
  // corpus
  MissingCatalog,
  FormatError,
  IoError,
  LevelMismatch,
  // stats
  EmptyInventory,
  DegenerateSpectrum,
  TooFewPairs,
  UnknownProxy,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI, the Python module) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sqltpl
