#include "sqltpl/templatizer.hpp"

#include <algorithm>
#include <map>

#include "sqltpl/error.hpp"
#include "sqltpl/structure.hpp"

namespace sqltpl {

std::string_view to_string(Level level) noexcept {
  return level == Level::Hard ? "HARD" : "SOFT";
}

Level parse_level(std::string_view text) {
  auto up = to_upper(text);
  if (up == "HARD") return Level::Hard;
  if (up == "SOFT") return Level::Soft;
  throw Error(ErrorCode::InvalidArgument, "level must be hard or soft, got '" + std::string(text) + "'");
}

namespace {

bool has_index_suffix(std::string_view text, std::string_view prefix) {
  if (text.size() <= prefix.size() || text.substr(0, prefix.size()) != prefix) return false;
  return std::all_of(text.begin() + static_cast<std::ptrdiff_t>(prefix.size()), text.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

bool is_hard_identifier_placeholder(std::string_view text) noexcept {
  return text == "table_name" || text == "col_name" || text == "new_table" ||
         text == "new_view" || text == "new_column" || has_index_suffix(text, "table_alias") ||
         has_index_suffix(text, "column_alias") || has_index_suffix(text, "CTE");
}

bool is_literal_placeholder(std::string_view text) noexcept {
  return text == "num" || text == "string" || text == "date" || text == "boolean" ||
         text == "jsonb" || text == "others";
}

std::string render_canonical(const std::vector<TemplateToken>& tokens) {
  std::string out;
  bool glue_next = true;  // no space before the first token
  for (const auto& t : tokens) {
    const bool is_comma = t.kind == TemplateToken::Kind::Symbol && t.text == ",";
    const bool is_dot = t.kind == TemplateToken::Kind::Symbol && t.text == ".";
    const bool call_open = t.call_paren && t.text == "(";
    const bool call_close = t.call_paren && t.text == ")";
    if (!glue_next && !is_comma && !is_dot && !call_open && !call_close) out.push_back(' ');
    out += t.text;
    glue_next = is_dot || call_open;
  }
  return out;
}

namespace {

class HardBuilder {
 public:
  HardBuilder(const TokenStream& ts, const SchemaCatalog& catalog)
      : ts_(ts), catalog_(catalog), st_(analyze_structure(ts)) {
    // Aliases are numbered by their defining occurrence, which for table
    // aliases means FROM/JOIN order and for column aliases the first AS.
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const Role r = st_.info[i].role;
      if (r == Role::TableAliasDef) {
        table_alias_index_.emplace(i, table_alias_index_.size());
      } else if (r == Role::ColumnAliasDef) {
        column_alias_index_.try_emplace(ts[i].upper, column_alias_index_.size());
      }
    }
  }

  Template build() {
    Template out;
    out.level = Level::Hard;
    out.tokens.reserve(ts_.size());
    for (std::size_t i = 0; i < ts_.size(); ++i) {
      // Implicit aliases are written with an explicit AS.
      const Role r = st_.info[i].role;
      if ((r == Role::TableAliasDef || r == Role::ColumnAliasDef) && i > 0 &&
          !ts_[i - 1].is_keyword("AS") && !ts_[i - 1].is_punct('(') && !ts_[i - 1].is_punct(',')) {
        out.tokens.push_back({Kind::Keyword, "AS", false});
      }
      out.tokens.push_back(convert(i, out.warnings));
    }
    out.canonical = render_canonical(out.tokens);
    return out;
  }

 private:
  using Kind = TemplateToken::Kind;

  const TokenStream& ts_;
  const SchemaCatalog& catalog_;
  Structure st_;
  std::map<std::size_t, std::size_t> table_alias_index_;     // defining token -> N
  std::map<std::string, std::size_t> column_alias_index_;    // upper name -> N

  [[nodiscard]] std::string cte(const std::string& upper) const {
    auto it = std::find(st_.cte_names.begin(), st_.cte_names.end(), upper);
    return "CTE" + std::to_string(it - st_.cte_names.begin());
  }

  [[nodiscard]] std::string table_alias(std::size_t def) const {
    return "table_alias" + std::to_string(table_alias_index_.at(def));
  }

  [[nodiscard]] const std::size_t* column_alias(const std::string& upper) const {
    auto it = column_alias_index_.find(upper);
    return it == column_alias_index_.end() ? nullptr : &it->second;
  }

  std::string identifier(std::size_t i, std::vector<std::string>& warnings) const {
    const Token& t = ts_[i];
    const TokenInfo& info = st_.info[i];
    const std::string& up = t.upper;
    switch (info.role) {
      case Role::CteDef:
        return cte(up);
      case Role::ViewDef:
        return catalog_.has_table(t.text) ? "table_name" : "new_view";
      case Role::TableAliasDef:
        return table_alias(i);
      case Role::ColumnAliasDef:
        return "column_alias" + std::to_string(column_alias_index_.at(up));
      case Role::TableRef:
        if (st_.is_cte(up)) return cte(up);
        return catalog_.has_table(t.text) ? "table_name" : "new_table";
      case Role::Qualifier: {
        if (auto def = st_.resolve_table_alias(info.scope, up); def != Structure::npos) {
          return table_alias(def);
        }
        if (st_.is_cte(up)) return cte(up);
        if (catalog_.has_table(t.text)) return "table_name";
        warnings.push_back("qualifier '" + t.text + "' names no alias, CTE or table");
        return "new_table";
      }
      case Role::QualifiedColumn:
        if (catalog_.has_column(t.text)) return "col_name";
        if (const auto* n = column_alias(up)) return "column_alias" + std::to_string(*n);
        return "new_column";
      default:
        break;
    }
    // Bare identifier in an expression.
    if (catalog_.has_column(t.text)) return "col_name";
    if (const auto* n = column_alias(up)) return "column_alias" + std::to_string(*n);
    if (auto def = st_.resolve_table_alias(info.scope, up); def != Structure::npos) {
      return table_alias(def);
    }
    if (st_.is_cte(up)) return cte(up);
    if (catalog_.has_table(t.text)) return "table_name";
    return "new_column";
  }

  TemplateToken convert(std::size_t i, std::vector<std::string>& warnings) const {
    const Token& t = ts_[i];
    const TokenInfo& info = st_.info[i];
    TemplateToken out;
    switch (t.kind) {
      case TokenKind::Keyword:
        out.kind = info.role == Role::FunctionName ? Kind::Function : Kind::Keyword;
        out.text = t.upper;
        break;
      case TokenKind::Identifier:
        if (info.role == Role::FunctionName) {
          out.kind = Kind::Function;
          out.text = t.upper;
        } else if (info.role == Role::TypeName) {
          out.kind = Kind::Verbatim;
          out.text = t.upper;
        } else {
          out.kind = Kind::Identifier;
          out.text = identifier(i, warnings);
        }
        break;
      case TokenKind::NumberLiteral:
      case TokenKind::StringLiteral:
      case TokenKind::DateLiteral:
      case TokenKind::BooleanLiteral:
      case TokenKind::NullLiteral:
        if (info.role == Role::ColumnAliasDef) {
          out.kind = Kind::Identifier;
          out.text = "column_alias" + std::to_string(column_alias_index_.at(t.upper));
        } else {
          out.kind = Kind::Literal;
          out.text = std::string(placeholder(classify_literal(t)));
        }
        break;
      case TokenKind::Operator:
      case TokenKind::Punct:
      case TokenKind::Star:
      case TokenKind::Param:
        out.kind = Kind::Symbol;
        out.text = t.kind == TokenKind::Operator ? t.upper : t.text;
        out.call_paren = info.call_paren;
        break;
    }
    return out;
  }
};

}  // namespace

Template hard_template(const TokenStream& tokens, const SchemaCatalog& catalog) {
  return HardBuilder(tokens, catalog).build();
}

std::vector<TemplateToken> collapse_identifiers(const std::vector<TemplateToken>& tokens) {
  using Kind = TemplateToken::Kind;
  std::vector<TemplateToken> out;
  out.reserve(tokens.size());
  auto is_dot = [](const TemplateToken& t) { return t.kind == Kind::Symbol && t.text == "."; };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.kind != Kind::Identifier) {
      out.push_back(t);
      continue;
    }
    out.push_back({Kind::Identifier, "variable", false});
    // x.y (and x.y.z) is one reference; x.* keeps its star.
    while (i + 2 < tokens.size() && is_dot(tokens[i + 1]) &&
           tokens[i + 2].kind == Kind::Identifier) {
      i += 2;
    }
  }
  return out;
}

Template soft_template(const Template& hard) {
  if (hard.level != Level::Hard) {
    throw Error(ErrorCode::WrongLevel, "soft_template expects a hard template");
  }
  Template out;
  out.level = Level::Soft;
  out.tokens = collapse_identifiers(hard.tokens);
  out.canonical = render_canonical(out.tokens);
  out.warnings = hard.warnings;
  return out;
}

TemplatePair templatize(std::string_view sql, const SchemaCatalog& catalog) {
  TemplatePair pair;
  pair.hard = hard_template(lex(sql), catalog);
  pair.soft = soft_template(pair.hard);
  return pair;
}

}  // namespace sqltpl
