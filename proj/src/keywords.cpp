#include <algorithm>
#include <string_view>
#include <vector>

#include "sqltpl/lexer.hpp"

namespace sqltpl {
namespace {

// The SQLite keyword list (https://www.sqlite.org/lang_keywords.html), kept sorted.
const std::vector<std::string_view> kKeywords = {
    "ABORT",        "ACTION",       "ADD",          "AFTER",        "ALL",
    "ALTER",        "ALWAYS",       "ANALYZE",      "AND",          "AS",
    "ASC",          "ATTACH",       "AUTOINCREMENT", "BEFORE",      "BEGIN",
    "BETWEEN",      "BY",           "CASCADE",      "CASE",         "CAST",
    "CHECK",        "COLLATE",      "COLUMN",       "COMMIT",       "CONFLICT",
    "CONSTRAINT",   "CREATE",       "CROSS",        "CURRENT",      "CURRENT_DATE",
    "CURRENT_TIME", "CURRENT_TIMESTAMP", "DATABASE", "DEFAULT",     "DEFERRABLE",
    "DEFERRED",     "DELETE",       "DESC",         "DETACH",       "DISTINCT",
    "DO",           "DROP",         "EACH",         "ELSE",         "END",
    "ESCAPE",       "EXCEPT",       "EXCLUDE",      "EXCLUSIVE",    "EXISTS",
    "EXPLAIN",      "FAIL",         "FILTER",       "FIRST",        "FOLLOWING",
    "FOR",          "FOREIGN",      "FROM",         "FULL",         "GENERATED",
    "GLOB",         "GROUP",        "GROUPS",       "HAVING",       "IF",
    "IGNORE",       "IMMEDIATE",    "IN",           "INDEX",        "INDEXED",
    "INITIALLY",    "INNER",        "INSERT",       "INSTEAD",      "INTERSECT",
    "INTO",         "IS",           "ISNULL",       "JOIN",         "KEY",
    "LAST",         "LEFT",         "LIKE",         "LIMIT",        "MATCH",
    "MATERIALIZED", "NATURAL",      "NO",           "NOT",          "NOTHING",
    "NOTNULL",      "NULL",         "NULLS",        "OF",           "OFFSET",
    "ON",           "OR",           "ORDER",        "OTHERS",       "OUTER",
    "OVER",         "PARTITION",    "PLAN",         "PRAGMA",       "PRECEDING",
    "PRIMARY",      "QUERY",        "RAISE",        "RANGE",        "RECURSIVE",
    "REFERENCES",   "REGEXP",       "REINDEX",      "RELEASE",      "RENAME",
    "REPLACE",      "RESTRICT",     "RETURNING",    "RIGHT",        "ROLLBACK",
    "ROW",          "ROWS",         "SAVEPOINT",    "SELECT",       "SET",
    "TABLE",        "TEMP",         "TEMPORARY",    "THEN",         "TIES",
    "TO",           "TRANSACTION",  "TRIGGER",      "UNBOUNDED",    "UNION",
    "UNIQUE",       "UPDATE",       "USING",        "VACUUM",       "VALUES",
    "VIEW",         "VIRTUAL",      "WHEN",         "WHERE",        "WINDOW",
    "WITH",         "WITHOUT",
};

// Built-in SQLite functions: core, aggregate, window, date/time, math, JSON,
// and the percentile extension. Sorted.
const std::vector<std::string_view> kFunctions = [] {
  std::vector<std::string_view> v = {
      "ABS", "ACOS", "ACOSH", "ASIN", "ASINH", "ATAN", "ATAN2", "ATANH", "AVG", "CEIL",
      "CEILING", "CHANGES", "CHAR", "COALESCE", "CONCAT", "CONCAT_WS", "COS", "COSH",
      "COUNT", "CUME_DIST", "DATE", "DATETIME", "DEGREES", "DENSE_RANK", "EXP",
      "FIRST_VALUE", "FLOOR", "FORMAT", "GROUP_CONCAT", "HEX", "IFNULL", "IIF", "INSTR",
      "JSON", "JSON_ARRAY", "JSON_ARRAY_LENGTH", "JSON_EACH", "JSON_EXTRACT",
      "JSON_GROUP_ARRAY", "JSON_GROUP_OBJECT", "JSON_INSERT", "JSON_OBJECT", "JSON_PATCH",
      "JSON_QUOTE", "JSON_REMOVE", "JSON_REPLACE", "JSON_SET", "JSON_TREE", "JSON_TYPE",
      "JSON_VALID", "JULIANDAY", "LAG", "LAST_INSERT_ROWID", "LAST_VALUE", "LEAD",
      "LENGTH", "LIKELIHOOD", "LIKELY", "LN", "LOG", "LOG10", "LOG2", "LOWER", "LTRIM",
      "MAX", "MEDIAN", "MIN", "MOD", "NTH_VALUE", "NTILE", "NULLIF", "OCTET_LENGTH",
      "PERCENTILE", "PERCENTILE_CONT", "PERCENTILE_DISC", "PERCENT_RANK", "PI", "POW",
      "POWER", "PRINTF", "QUOTE", "RADIANS", "RANDOM", "RANDOMBLOB", "RANK", "REPLACE", "ROUND",
      "ROW_NUMBER", "RTRIM", "SIGN", "SIN", "SINH", "SOUNDEX", "SQRT", "STRFTIME",
      "STRING_AGG", "SUBSTR", "SUBSTRING", "SUM", "TAN", "TANH", "TIME", "TIMEDIFF",
      "TOTAL", "TOTAL_CHANGES", "TRIM", "TRUNC", "TYPEOF", "UNHEX", "UNICODE", "UNIXEPOCH",
      "UNLIKELY", "UPPER", "ZEROBLOB",
  };
  std::sort(v.begin(), v.end());
  return v;
}();

const std::vector<std::string_view> kAggregates = {
    "AVG", "COUNT", "GROUP_CONCAT", "MAX", "MIN", "SUM", "TOTAL",
};

const std::vector<std::string_view> kPercentiles = {
    "CUME_DIST", "MEDIAN", "NTILE", "PERCENTILE", "PERCENTILE_CONT", "PERCENTILE_DISC",
    "PERCENT_RANK",
};

bool contains(const std::vector<std::string_view>& sorted, std::string_view word) {
  return std::binary_search(sorted.begin(), sorted.end(), word);
}

}  // namespace

bool is_sqlite_keyword(std::string_view upper) noexcept { return contains(kKeywords, upper); }
bool is_function_name(std::string_view upper) noexcept { return contains(kFunctions, upper); }
bool is_aggregate_function(std::string_view upper) noexcept {
  return contains(kAggregates, upper);
}
bool is_percentile_function(std::string_view upper) noexcept {
  return contains(kPercentiles, upper);
}

const std::vector<std::string_view>& sqlite_keywords() { return kKeywords; }
const std::vector<std::string_view>& function_names() { return kFunctions; }

}  // namespace sqltpl
