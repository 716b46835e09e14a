#include "sqltpl/error.hpp"

namespace sqltpl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::UnterminatedComment: return "UnterminatedComment";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MultipleStatements: return "MultipleStatements";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateTable: return "DuplicateTable";
    case ErrorCode::EmptyCatalog: return "EmptyCatalog";
    case ErrorCode::WrongLevel: return "WrongLevel";
    case ErrorCode::MissingCatalog: return "MissingCatalog";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::EmptyInventory: return "EmptyInventory";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::TooFewPairs: return "TooFewPairs";
    case ErrorCode::UnknownProxy: return "UnknownProxy";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace sqltpl
