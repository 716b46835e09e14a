#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sqltpl/lexer.hpp"
#include "sqltpl/schema.hpp"

namespace sqltpl {

/// What an individual token does in its statement. Only identifiers (and
/// the occasional string literal used as an alias) get a non-Plain role,
/// except FunctionName, which also marks keyword function calls.
enum class Role {
  Plain,
  TableRef,        // table slot after FROM / JOIN / INTO / UPDATE / TABLE
  TableAliasDef,   // FROM t [AS] x
  ColumnAliasDef,  // SELECT expr [AS] x, or WITH c(x, y)
  CteDef,          // WITH x AS (...)
  ViewDef,         // CREATE VIEW x
  Qualifier,       // x in x.y
  QualifiedColumn, // y in x.y
  ColumnRef,       // any other identifier in an expression
  FunctionName,    // name of a call: COUNT(...), my_udf(...)
  TypeName,        // CAST(expr AS type)
};

struct TokenInfo {
  Role role = Role::Plain;
  Clause clause = Clause::None;
  /// Innermost SELECT core containing the token, or -1.
  int scope = -1;
  /// Number of enclosing parenthesised queries (CTE bodies included).
  int query_depth = 0;
  /// For '(' and ')': the parenthesis belongs to a function call.
  bool call_paren = false;
};

struct QueryScope {
  int parent = -1;
  int depth = 0;
  /// Table aliases defined in this SELECT core: upper-case name and the
  /// index of the defining token.
  std::vector<std::pair<std::string, std::size_t>> table_aliases;
};

/// Result of a single left-to-right pass that tracks parentheses, clauses,
/// and query scopes. It is deliberately shallow: enough to tell table slots
/// from expressions and to find alias and CTE definitions, not a parser.
struct Structure {
  std::vector<TokenInfo> info;
  std::vector<QueryScope> scopes;
  /// Indexes of SELECT keyword tokens.
  std::vector<std::size_t> selects;
  /// Upper-case CTE names in definition order.
  std::vector<std::string> cte_names;
  /// FROM-list commas separating two relations.
  std::size_t comma_joins = 0;

  /// Finds the table alias `upper` visible from `scope`, walking outwards.
  /// Returns the defining token index, or npos.
  [[nodiscard]] std::size_t resolve_table_alias(int scope, const std::string& upper) const;
  [[nodiscard]] bool is_cte(const std::string& upper) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

Structure analyze_structure(const TokenStream& tokens);

}  // namespace sqltpl
