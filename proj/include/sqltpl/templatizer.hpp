#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sqltpl/lexer.hpp"
#include "sqltpl/schema.hpp"

namespace sqltpl {

enum class Level { Hard, Soft };

std::string_view to_string(Level level) noexcept;
/// Accepts "hard"/"soft" in any case. Throws InvalidArgument otherwise.
Level parse_level(std::string_view text);

struct TemplateToken {
  enum class Kind {
    Keyword,      // SQL keyword, upper case
    Function,     // name of a function call, upper case
    Identifier,   // identifier placeholder: col_name, table_alias0, variable, ...
    Literal,      // typed literal placeholder: num, string, date, boolean, others
    Symbol,       // operator, punctuation, '*', bound parameter
    Verbatim,     // type name inside CAST
  };

  Kind kind = Kind::Symbol;
  std::string text;
  /// For '(' and ')': delimits a function call's arguments.
  bool call_paren = false;

  friend bool operator==(const TemplateToken&, const TemplateToken&) = default;
};

struct Template {
  Level level = Level::Hard;
  std::vector<TemplateToken> tokens;
  /// Identity key: see render_canonical().
  std::string canonical;
  /// Non-fatal resolution problems, e.g. a qualifier that names no alias,
  /// CTE or table.
  std::vector<std::string> warnings;
};

struct TemplatePair {
  Template hard;
  Template soft;
};

/// Joins tokens with single spaces, except that commas attach to the
/// preceding token, `.` binds both sides, and function-call parentheses hug
/// their contents: "SELECT AVG(col_name), table_alias0.col_name FROM ( ... )".
std::string render_canonical(const std::vector<TemplateToken>& tokens);

/// Literal abstraction, schema-aware identifier replacement, alias and CTE
/// normalisation, and qualified-reference resolution over a lexed query.
Template hard_template(const TokenStream& tokens, const SchemaCatalog& catalog);

/// Collapses every identifier placeholder (qualified pairs included) to
/// `variable`; literal placeholders, keywords and symbols are kept.
/// Throws WrongLevel when given a soft template.
Template soft_template(const Template& hard);

/// The token rewrite behind soft_template(). Idempotent.
std::vector<TemplateToken> collapse_identifiers(const std::vector<TemplateToken>& tokens);

TemplatePair templatize(std::string_view sql, const SchemaCatalog& catalog);

/// Placeholder vocabulary of hard templates.
bool is_hard_identifier_placeholder(std::string_view text) noexcept;
bool is_literal_placeholder(std::string_view text) noexcept;

}  // namespace sqltpl
