#include "sqltpl/structure.hpp"

#include <algorithm>

namespace sqltpl {

std::size_t Structure::resolve_table_alias(int scope, const std::string& upper) const {
  while (scope >= 0) {
    const auto& defs = scopes[static_cast<std::size_t>(scope)].table_aliases;
    for (auto it = defs.rbegin(); it != defs.rend(); ++it) {
      if (it->first == upper) return it->second;
    }
    scope = scopes[static_cast<std::size_t>(scope)].parent;
  }
  return npos;
}

bool Structure::is_cte(const std::string& upper) const {
  return std::find(cte_names.begin(), cte_names.end(), upper) != cte_names.end();
}

namespace {

enum class FromState { None, ExpectTable, AfterTable, ExpectAlias, AfterAlias };
enum class WithState { None, ExpectName, AfterName, ExpectBody, AfterBody };
enum class FrameKind { Top, Query, Call, Group, CteColumns };

struct Frame {
  FrameKind kind = FrameKind::Top;
  Clause clause = Clause::None;
  int outer_scope = -1;
  int scope = -1;
  FromState from = FromState::None;
  WithState with = WithState::None;
  bool cte_body = false;
  bool cast = false;
  bool cast_type = false;
  bool view_target = false;
  bool expect_col_alias = false;
  bool expr_end = false;

  [[nodiscard]] int effective_scope() const { return scope >= 0 ? scope : outer_scope; }
  [[nodiscard]] bool query_level() const {
    return kind == FrameKind::Top || kind == FrameKind::Query;
  }
};

bool is_name(const Token& t) { return t.kind == TokenKind::Identifier; }

class Analyzer {
 public:
  explicit Analyzer(const TokenStream& ts) : ts_(ts) {
    out_.info.resize(ts.size());
    stack_.push_back(Frame{});
  }

  Structure run() {
    for (i_ = 0; i_ < ts_.size(); ++i_) step();
    return std::move(out_);
  }

 private:
  const TokenStream& ts_;
  Structure out_;
  std::vector<Frame> stack_;
  std::size_t i_ = 0;
  int query_depth_ = 0;

  Frame& top() { return stack_.back(); }

  [[nodiscard]] const Token* next() const { return i_ + 1 < ts_.size() ? &ts_[i_ + 1] : nullptr; }
  [[nodiscard]] const Token* prev() const { return i_ > 0 ? &ts_[i_ - 1] : nullptr; }
  [[nodiscard]] bool next_is(char c) const { return next() != nullptr && next()->is_punct(c); }
  [[nodiscard]] bool prev_is(char c) const { return prev() != nullptr && prev()->is_punct(c); }

  void stamp() {
    auto& info = out_.info[i_];
    info.clause = top().clause;
    info.scope = top().effective_scope();
    info.query_depth = query_depth_;
  }

  int new_scope(int parent) {
    out_.scopes.push_back({parent, query_depth_, {}});
    return static_cast<int>(out_.scopes.size()) - 1;
  }

  void open_paren() {
    Frame& f = top();
    Frame child;
    child.outer_scope = f.effective_scope();
    child.scope = child.outer_scope;
    const Token* n = next();
    const bool starts_query =
        n != nullptr && (n->is_keyword("SELECT") || n->is_keyword("WITH") || n->is_keyword("VALUES"));

    if (i_ > 0 && out_.info[i_ - 1].role == Role::FunctionName) {
      child.kind = FrameKind::Call;
      child.clause = f.clause;
      child.cast = prev()->upper == "CAST";
      out_.info[i_].call_paren = true;
    } else if (f.clause == Clause::With && f.with == WithState::AfterName) {
      child.kind = FrameKind::CteColumns;
      child.clause = Clause::With;
      out_.info[i_].call_paren = true;
    } else if ((f.clause == Clause::With && f.with == WithState::ExpectBody) || starts_query) {
      child.kind = FrameKind::Query;
      child.scope = -1;
      child.cte_body = f.clause == Clause::With && f.with == WithState::ExpectBody;
    } else {
      child.kind = FrameKind::Group;
      child.clause = f.clause;
      if (f.clause == Clause::From) {
        // A parenthesised join keeps looking for tables; a column list after
        // INSERT INTO t / CREATE TABLE t holds plain names.
        if (f.from == FromState::ExpectTable) {
          child.from = FromState::ExpectTable;
        } else {
          child.clause = Clause::None;
        }
      }
    }
    f.expr_end = false;
    f.expect_col_alias = false;
    if (child.kind == FrameKind::Query) ++query_depth_;
    stack_.push_back(child);
  }

  void close_paren() {
    if (stack_.size() == 1) {
      stamp();
      return;
    }
    Frame closed = stack_.back();
    stack_.pop_back();
    if (closed.kind == FrameKind::Query) --query_depth_;
    stamp();
    out_.info[i_].call_paren =
        closed.kind == FrameKind::Call || closed.kind == FrameKind::CteColumns;
    Frame& f = top();
    if (closed.cte_body) f.with = WithState::AfterBody;
    if (f.clause == Clause::From && f.from == FromState::ExpectTable) f.from = FromState::AfterTable;
    f.expr_end = true;
  }

  void comma() {
    Frame& f = top();
    if (f.clause == Clause::From && f.kind != FrameKind::Call &&
        (f.from == FromState::AfterTable || f.from == FromState::AfterAlias)) {
      ++out_.comma_joins;
      f.from = FromState::ExpectTable;
    } else if (f.clause == Clause::With && f.with == WithState::AfterBody) {
      f.with = WithState::ExpectName;
    }
    f.expect_col_alias = false;
    f.expr_end = false;
  }

  void set_clause(Clause c) {
    Frame& f = top();
    f.clause = c;
    f.from = FromState::None;
    f.expect_col_alias = false;
  }

  void keyword() {
    Frame& f = top();
    const std::string& k = ts_[i_].upper;
    if (next_is('(') && (is_function_name(k) || k == "CAST")) {
      out_.info[i_].role = Role::FunctionName;
      f.expr_end = false;
      return;
    }
    bool ends_expr = false;
    if (k == "SELECT") {
      f.scope = new_scope(f.outer_scope);
      out_.info[i_].scope = f.scope;
      out_.selects.push_back(i_);
      set_clause(Clause::Select);
      f.with = WithState::None;
    } else if (k == "FROM") {
      if (f.kind != FrameKind::Call) {
        set_clause(Clause::From);
        f.from = FromState::ExpectTable;
      }
    } else if (k == "JOIN") {
      set_clause(Clause::From);
      f.from = FromState::ExpectTable;
    } else if (k == "INTO" || k == "UPDATE") {
      set_clause(Clause::From);
      f.from = FromState::ExpectTable;
    } else if (k == "TABLE" || k == "VIEW") {
      const Token* p = prev();
      if (p != nullptr && (p->is_keyword("CREATE") || p->is_keyword("TEMP") ||
                           p->is_keyword("TEMPORARY") || p->is_keyword("DROP") ||
                           p->is_keyword("ALTER"))) {
        set_clause(Clause::From);
        f.from = FromState::ExpectTable;
        f.view_target = k == "VIEW" && !p->is_keyword("DROP");
      }
    } else if (k == "ON" || k == "USING") {
      set_clause(Clause::On);
    } else if (k == "WHERE") {
      set_clause(Clause::Where);
    } else if (k == "GROUP") {
      set_clause(Clause::GroupBy);
    } else if (k == "HAVING") {
      set_clause(Clause::Having);
    } else if (k == "ORDER") {
      set_clause(Clause::OrderBy);
    } else if (k == "LIMIT" || k == "OFFSET") {
      set_clause(Clause::Limit);
    } else if (k == "WINDOW") {
      set_clause(Clause::Window);
    } else if (k == "SET") {
      set_clause(Clause::Set);
    } else if (k == "VALUES") {
      set_clause(Clause::Values);
    } else if (k == "UNION" || k == "INTERSECT" || k == "EXCEPT") {
      set_clause(Clause::None);
      f.scope = -1;
    } else if (k == "WITH") {
      set_clause(Clause::With);
      f.with = WithState::ExpectName;
    } else if (k == "AS") {
      if (f.cast) {
        f.cast_type = true;
      } else if (f.clause == Clause::With && f.with == WithState::AfterName) {
        f.with = WithState::ExpectBody;
      } else if (f.clause == Clause::From && f.from == FromState::AfterTable) {
        f.from = FromState::ExpectAlias;
      } else if (f.clause == Clause::Select && f.query_level()) {
        f.expect_col_alias = true;
      }
    } else if (k == "END" || k == "CURRENT_DATE" || k == "CURRENT_TIME" ||
               k == "CURRENT_TIMESTAMP") {
      ends_expr = true;
    }
    stamp_clause_only();
    f.expr_end = ends_expr;
  }

  // Keywords that switch clause belong to the clause they open.
  void stamp_clause_only() { out_.info[i_].clause = top().clause; }

  void identifier() {
    Frame& f = top();
    const Token& t = ts_[i_];
    auto& info = out_.info[i_];
    auto role = Role::ColumnRef;

    if (f.clause == Clause::From && f.from == FromState::ExpectTable) {
      if (next_is('.')) {
        role = Role::Qualifier;  // schema name, the table follows
      } else {
        role = f.view_target ? Role::ViewDef : Role::TableRef;
        f.view_target = false;
        f.from = FromState::AfterTable;
      }
    } else if (next_is('.')) {
      role = Role::Qualifier;
    } else if (prev_is('.')) {
      role = Role::QualifiedColumn;
    } else if (f.cast && f.cast_type) {
      role = Role::TypeName;
    } else if (next_is('(') && f.kind != FrameKind::CteColumns &&
               !(f.clause == Clause::With && f.with == WithState::ExpectName)) {
      role = Role::FunctionName;
    } else if (f.kind == FrameKind::CteColumns) {
      role = Role::ColumnAliasDef;
    } else if (f.clause == Clause::With && f.with == WithState::ExpectName) {
      role = Role::CteDef;
      if (!out_.is_cte(t.upper)) out_.cte_names.push_back(t.upper);
      f.with = WithState::AfterName;
    } else if (f.clause == Clause::From &&
               (f.from == FromState::AfterTable || f.from == FromState::ExpectAlias)) {
      role = Role::TableAliasDef;
      if (f.scope < 0) {
        f.scope = new_scope(f.outer_scope);
        info.scope = f.scope;
      }
      out_.scopes[static_cast<std::size_t>(f.scope)].table_aliases.emplace_back(t.upper, i_);
      f.from = FromState::AfterAlias;
    } else if (f.clause == Clause::Select && f.query_level() && (f.expect_col_alias || f.expr_end)) {
      role = Role::ColumnAliasDef;
      f.expect_col_alias = false;
    }
    info.role = role;
    f.expr_end = role == Role::ColumnRef || role == Role::QualifiedColumn;
  }

  void step() {
    stamp();
    const Token& t = ts_[i_];
    Frame& f = top();
    if (t.is_punct('(')) {
      open_paren();
    } else if (t.is_punct(')')) {
      close_paren();
    } else if (t.is_punct(',')) {
      comma();
    } else if (t.kind == TokenKind::Keyword) {
      keyword();
    } else if (is_name(t)) {
      identifier();
    } else if (t.kind == TokenKind::StringLiteral && f.clause == Clause::Select &&
               f.query_level() && f.expect_col_alias) {
      out_.info[i_].role = Role::ColumnAliasDef;
      f.expect_col_alias = false;
      f.expr_end = false;
    } else {
      f.expr_end = t.is_literal() || t.kind == TokenKind::Star || t.kind == TokenKind::Param;
      if (!t.is_punct('.')) f.expect_col_alias = false;
    }
  }
};

}  // namespace

Structure analyze_structure(const TokenStream& tokens) { return Analyzer(tokens).run(); }

}  // namespace sqltpl
