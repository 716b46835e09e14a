#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "sqltpl/lexer.hpp"
#include "sqltpl/schema.hpp"

namespace sqltpl {

enum class Proxy {
  NumTables,
  NumJoins,
  NumSubqueries,
  MaxNestingDepth,
  NumAggsPlusGroupBy,
  AdvancedFeatureCount,
};

inline constexpr std::size_t kProxyCount = 6;
inline constexpr std::array<Proxy, kProxyCount> kAllProxies = {
    Proxy::NumTables,       Proxy::NumJoins,           Proxy::NumSubqueries,
    Proxy::MaxNestingDepth, Proxy::NumAggsPlusGroupBy, Proxy::AdvancedFeatureCount,
};

/// snake_case name, e.g. "num_aggs_plus_group_by".
std::string_view to_string(Proxy proxy) noexcept;
/// Throws UnknownProxy.
Proxy parse_proxy(std::string_view name);

struct ComplexityProfile {
  std::uint32_t num_tables = 0;
  std::uint32_t num_joins = 0;
  std::uint32_t num_subqueries = 0;
  std::uint32_t max_nesting_depth = 0;
  std::uint32_t num_aggs_plus_group_by = 0;
  std::uint32_t advanced_feature_count = 0;

  [[nodiscard]] std::uint32_t get(Proxy p) const noexcept;
  void set(Proxy p, std::uint32_t value) noexcept;

  friend bool operator==(const ComplexityProfile&, const ComplexityProfile&) = default;
};

/// Distinct base tables in table slots anywhere in the statement. CTE names
/// are not tables; the tables inside their bodies are.
std::uint32_t count_tables(const TokenStream& tokens, const SchemaCatalog& catalog);
/// JOIN keywords plus implicit comma joins.
std::uint32_t count_joins(const TokenStream& tokens);
/// SELECTs nested inside a parenthesised query or a CTE body.
std::uint32_t count_subqueries(const TokenStream& tokens);
/// Outermost query is depth 0.
std::uint32_t max_nesting_depth(const TokenStream& tokens);
/// Aggregate calls (COUNT, SUM, AVG, MIN, MAX, TOTAL, GROUP_CONCAT) plus
/// GROUP BY clauses.
std::uint32_t count_aggs_group_by(const TokenStream& tokens);
/// OVER, FILTER(...), UNION / INTERSECT / EXCEPT, one per CTE, and
/// percentile-family calls.
std::uint32_t count_advanced(const TokenStream& tokens);

ComplexityProfile profile(const TokenStream& tokens, const SchemaCatalog& catalog);
ComplexityProfile profile(std::string_view sql, const SchemaCatalog& catalog);

}  // namespace sqltpl
