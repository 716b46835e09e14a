#include "sqltpl/complexity.hpp"

#include <algorithm>
#include <set>

#include "sqltpl/error.hpp"
#include "sqltpl/structure.hpp"

namespace sqltpl {

std::string_view to_string(Proxy proxy) noexcept {
  switch (proxy) {
    case Proxy::NumTables: return "num_tables";
    case Proxy::NumJoins: return "num_joins";
    case Proxy::NumSubqueries: return "num_subqueries";
    case Proxy::MaxNestingDepth: return "max_nesting_depth";
    case Proxy::NumAggsPlusGroupBy: return "num_aggs_plus_group_by";
    case Proxy::AdvancedFeatureCount: return "advanced_feature_count";
  }
  return "?";
}

Proxy parse_proxy(std::string_view name) {
  for (Proxy p : kAllProxies) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorCode::UnknownProxy, "unknown proxy '" + std::string(name) + "'");
}

std::uint32_t ComplexityProfile::get(Proxy p) const noexcept {
  switch (p) {
    case Proxy::NumTables: return num_tables;
    case Proxy::NumJoins: return num_joins;
    case Proxy::NumSubqueries: return num_subqueries;
    case Proxy::MaxNestingDepth: return max_nesting_depth;
    case Proxy::NumAggsPlusGroupBy: return num_aggs_plus_group_by;
    case Proxy::AdvancedFeatureCount: return advanced_feature_count;
  }
  return 0;
}

void ComplexityProfile::set(Proxy p, std::uint32_t value) noexcept {
  switch (p) {
    case Proxy::NumTables: num_tables = value; break;
    case Proxy::NumJoins: num_joins = value; break;
    case Proxy::NumSubqueries: num_subqueries = value; break;
    case Proxy::MaxNestingDepth: max_nesting_depth = value; break;
    case Proxy::NumAggsPlusGroupBy: num_aggs_plus_group_by = value; break;
    case Proxy::AdvancedFeatureCount: advanced_feature_count = value; break;
  }
}

namespace {

std::uint32_t tables(const TokenStream& ts, const Structure& st, const SchemaCatalog& catalog) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (st.info[i].role != Role::TableRef) continue;
    const auto& up = ts[i].upper;
    if (st.is_cte(up)) continue;
    // Catalog spelling when known so differently-cased references coincide.
    const TableDef* def = catalog.find_table(up);
    seen.insert(def != nullptr ? to_upper(def->name) : up);
  }
  return static_cast<std::uint32_t>(seen.size());
}

std::uint32_t joins(const TokenStream& ts, const Structure& st) {
  auto explicit_joins = std::count_if(ts.begin(), ts.end(),
                                      [](const Token& t) { return t.is_keyword("JOIN"); });
  return static_cast<std::uint32_t>(explicit_joins) + static_cast<std::uint32_t>(st.comma_joins);
}

std::uint32_t subqueries(const Structure& st) {
  return static_cast<std::uint32_t>(std::count_if(
      st.selects.begin(), st.selects.end(),
      [&](std::size_t i) { return st.info[i].query_depth > 0; }));
}

std::uint32_t depth(const Structure& st) {
  int best = 0;
  for (std::size_t i : st.selects) best = std::max(best, st.info[i].query_depth);
  return static_cast<std::uint32_t>(best);
}

std::uint32_t aggs(const TokenStream& ts, const Structure& st) {
  std::uint32_t n = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Token& t = ts[i];
    if (st.info[i].role == Role::FunctionName && is_aggregate_function(t.upper)) ++n;
    if (t.is_keyword("GROUP") && i + 1 < ts.size() && ts[i + 1].is_keyword("BY")) ++n;
  }
  return n;
}

std::uint32_t advanced(const TokenStream& ts, const Structure& st) {
  std::uint32_t n = static_cast<std::uint32_t>(st.cte_names.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Token& t = ts[i];
    if (t.kind != TokenKind::Keyword) continue;
    const auto& k = t.upper;
    if (k == "OVER" || k == "UNION" || k == "INTERSECT" || k == "EXCEPT") {
      ++n;
    } else if (k == "FILTER" && i + 1 < ts.size() && ts[i + 1].is_punct('(')) {
      ++n;
    } else if (st.info[i].role == Role::FunctionName && is_percentile_function(k)) {
      ++n;
    }
  }
  return n;
}

}  // namespace

std::uint32_t count_tables(const TokenStream& tokens, const SchemaCatalog& catalog) {
  return tables(tokens, analyze_structure(tokens), catalog);
}
std::uint32_t count_joins(const TokenStream& tokens) {
  return joins(tokens, analyze_structure(tokens));
}
std::uint32_t count_subqueries(const TokenStream& tokens) {
  return subqueries(analyze_structure(tokens));
}
std::uint32_t max_nesting_depth(const TokenStream& tokens) {
  return depth(analyze_structure(tokens));
}
std::uint32_t count_aggs_group_by(const TokenStream& tokens) {
  return aggs(tokens, analyze_structure(tokens));
}
std::uint32_t count_advanced(const TokenStream& tokens) {
  return advanced(tokens, analyze_structure(tokens));
}

ComplexityProfile profile(const TokenStream& tokens, const SchemaCatalog& catalog) {
  const Structure st = analyze_structure(tokens);
  ComplexityProfile p;
  p.num_tables = tables(tokens, st, catalog);
  p.num_joins = joins(tokens, st);
  p.num_subqueries = subqueries(st);
  p.max_nesting_depth = depth(st);
  p.num_aggs_plus_group_by = aggs(tokens, st);
  p.advanced_feature_count = advanced(tokens, st);
  return p;
}

ComplexityProfile profile(std::string_view sql, const SchemaCatalog& catalog) {
  return profile(lex(sql), catalog);
}

}  // namespace sqltpl
