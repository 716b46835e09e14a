#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sqltpl {

enum class TokenKind {
  Keyword,
  Identifier,
  NumberLiteral,
  StringLiteral,
  DateLiteral,
  BooleanLiteral,
  NullLiteral,
  Operator,
  Punct,
  Star,
  Param,
};

std::string_view to_string(TokenKind kind) noexcept;

struct Token {
  TokenKind kind = TokenKind::Punct;
  /// Original lexeme. String literals and quoted identifiers have their
  /// quotes stripped and doubled quote characters unescaped.
  std::string text;
  /// ASCII-uppercased `text`; the comparison key for keywords and for
  /// case-insensitive schema lookup.
  std::string upper;
  /// Identifier was written with "", [], or `` quoting.
  bool quoted = false;

  [[nodiscard]] bool is(TokenKind k) const noexcept { return kind == k; }
  [[nodiscard]] bool is_keyword(std::string_view kw) const noexcept {
    return kind == TokenKind::Keyword && upper == kw;
  }
  [[nodiscard]] bool is_punct(char c) const noexcept {
    return kind == TokenKind::Punct && text.size() == 1 && text[0] == c;
  }
  [[nodiscard]] bool is_literal() const noexcept;

  friend bool operator==(const Token&, const Token&) = default;
};

struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

/// A lexed statement. `spans[i]` locates `tokens[i]` in the source text.
/// The terminating semicolon, if any, is not part of the stream.
struct TokenStream {
  std::vector<Token> tokens;
  std::vector<SourceSpan> spans;

  [[nodiscard]] std::size_t size() const noexcept { return tokens.size(); }
  [[nodiscard]] bool empty() const noexcept { return tokens.empty(); }
  [[nodiscard]] const Token& operator[](std::size_t i) const { return tokens[i]; }
  [[nodiscard]] auto begin() const noexcept { return tokens.begin(); }
  [[nodiscard]] auto end() const noexcept { return tokens.end(); }
};

/// Tokenizes one SQLite statement. Comments and whitespace are dropped.
///
/// Bare words are keywords when they appear in the SQLite keyword list; the
/// names of built-in functions are keywords only when a `(` follows. Words
/// on either side of a `.` are always identifiers.
///
/// Throws Error with UnterminatedString, UnterminatedComment, EmptyInput,
/// MultipleStatements (anything but comments after the first `;`) or
/// ParseError (a byte that cannot start any token).
TokenStream lex(std::string_view sql);

/// Splits a script on top-level semicolons and lexes every statement.
/// Empty statements are dropped; an empty script yields an empty vector.
std::vector<TokenStream> lex_script(std::string_view sql);

/// Renders a stream back to SQL text with single spaces between tokens,
/// re-quoting string literals and quoted identifiers so the result lexes to
/// the same stream.
std::string render(const TokenStream& stream);

enum class LiteralType { Num, String, Date, Boolean, Others, Jsonb };

/// Placeholder spelling used in templates: num, string, date, boolean,
/// others. `jsonb` is reserved and never produced for SQLite input.
std::string_view placeholder(LiteralType type) noexcept;

/// Maps a raw literal lexeme ("50000", "'NY'", "'2021-03-04'", "TRUE",
/// "NULL") to its placeholder type. Throws InvalidArgument for anything
/// that is not a literal.
LiteralType classify_literal(std::string_view lexeme);
LiteralType classify_literal(const Token& token);

/// `YYYY-MM-DD` optionally followed by ` HH:MM` or ` HH:MM:SS`.
bool is_date_shaped(std::string_view text) noexcept;

// Keyword tables (uppercase lookups).
bool is_sqlite_keyword(std::string_view upper) noexcept;
bool is_function_name(std::string_view upper) noexcept;
bool is_aggregate_function(std::string_view upper) noexcept;
bool is_percentile_function(std::string_view upper) noexcept;
const std::vector<std::string_view>& sqlite_keywords();
const std::vector<std::string_view>& function_names();

std::string to_upper(std::string_view s);

}  // namespace sqltpl
