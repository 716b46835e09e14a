#include "sqltpl/lexer.hpp"

#include <cctype>
#include <string>
#include <utility>

#include "sqltpl/error.hpp"

namespace sqltpl {

std::string_view to_string(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::Keyword: return "KEYWORD";
    case TokenKind::Identifier: return "IDENTIFIER";
    case TokenKind::NumberLiteral: return "NUMBER_LITERAL";
    case TokenKind::StringLiteral: return "STRING_LITERAL";
    case TokenKind::DateLiteral: return "DATE_LITERAL";
    case TokenKind::BooleanLiteral: return "BOOLEAN_LITERAL";
    case TokenKind::NullLiteral: return "NULL_LITERAL";
    case TokenKind::Operator: return "OPERATOR";
    case TokenKind::Punct: return "PUNCT";
    case TokenKind::Star: return "STAR";
    case TokenKind::Param: return "PARAM";
  }
  return "?";
}

bool Token::is_literal() const noexcept {
  switch (kind) {
    case TokenKind::NumberLiteral:
    case TokenKind::StringLiteral:
    case TokenKind::DateLiteral:
    case TokenKind::BooleanLiteral:
    case TokenKind::NullLiteral:
      return true;
    default:
      return false;
  }
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

bool is_date_shaped(std::string_view t) noexcept {
  auto digits = [&](std::size_t from, std::size_t n) {
    if (from + n > t.size()) return false;
    for (std::size_t i = from; i < from + n; ++i) {
      if (t[i] < '0' || t[i] > '9') return false;
    }
    return true;
  };
  if (!(digits(0, 4) && t.size() >= 10 && t[4] == '-' && digits(5, 2) && t[7] == '-' &&
        digits(8, 2))) {
    return false;
  }
  if (t.size() == 10) return true;
  if (!(t.size() >= 16 && t[10] == ' ' && digits(11, 2) && t[13] == ':' && digits(14, 2))) {
    return false;
  }
  if (t.size() == 16) return true;
  return t.size() == 19 && t[16] == ':' && digits(17, 2);
}

std::string_view placeholder(LiteralType type) noexcept {
  switch (type) {
    case LiteralType::Num: return "num";
    case LiteralType::String: return "string";
    case LiteralType::Date: return "date";
    case LiteralType::Boolean: return "boolean";
    case LiteralType::Others: return "others";
    case LiteralType::Jsonb: return "jsonb";
  }
  return "others";
}

LiteralType classify_literal(const Token& token) {
  switch (token.kind) {
    case TokenKind::NumberLiteral: return LiteralType::Num;
    case TokenKind::StringLiteral: return LiteralType::String;
    case TokenKind::DateLiteral: return LiteralType::Date;
    case TokenKind::BooleanLiteral: return LiteralType::Boolean;
    case TokenKind::NullLiteral: return LiteralType::Others;
    default:
      throw Error(ErrorCode::InvalidArgument, "not a literal token: " + token.text);
  }
}

LiteralType classify_literal(std::string_view lexeme) {
  TokenStream ts;
  try {
    ts = lex(lexeme);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidArgument, "not a literal: " + std::string(lexeme));
  }
  if (ts.size() != 1) {
    throw Error(ErrorCode::InvalidArgument, "not a single literal: " + std::string(lexeme));
  }
  return classify_literal(ts[0]);
}

namespace {

bool is_ident_start(unsigned char c) {
  return std::isalpha(c) != 0 || c == '_' || c >= 0x80;
}
bool is_ident_char(unsigned char c) {
  return std::isalnum(c) != 0 || c == '_' || c == '$' || c >= 0x80;
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  TokenStream run() {
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      if (src_[pos_] == ';') {
        ++pos_;
        expect_only_trivia();
        break;
      }
      lex_one();
    }
    if (out_.empty()) throw Error(ErrorCode::EmptyInput, "no tokens after stripping comments");
    return std::move(out_);
  }

  std::vector<TokenStream> run_script() {
    std::vector<TokenStream> statements;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size() || src_[pos_] == ';') {
        if (!out_.empty()) statements.push_back(std::exchange(out_, TokenStream{}));
        if (pos_ >= src_.size()) break;
        ++pos_;
        continue;
      }
      lex_one();
    }
    return statements;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  TokenStream out_;

  [[nodiscard]] char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) != 0) {
        ++pos_;
      } else if (c == '-' && peek(1) == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && peek(1) == '*') {
        auto close = src_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) {
          throw Error(ErrorCode::UnterminatedComment,
                      "block comment opened at offset " + std::to_string(pos_));
        }
        pos_ = close + 2;
      } else {
        break;
      }
    }
  }

  void expect_only_trivia() {
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) return;
      if (src_[pos_] != ';') {
        throw Error(ErrorCode::MultipleStatements,
                    "only one statement is accepted; extra input at offset " +
                        std::to_string(pos_));
      }
      ++pos_;
    }
  }

  // Next significant byte after the current position, skipping whitespace
  // and comments.
  [[nodiscard]] char next_significant(std::size_t from) const {
    from = next_significant_pos(from);
    return from < src_.size() ? src_[from] : '\0';
  }

  [[nodiscard]] std::size_t next_significant_pos(std::size_t from) const {
    while (from < src_.size()) {
      char c = src_[from];
      if (std::isspace(static_cast<unsigned char>(c)) != 0) {
        ++from;
      } else if (c == '-' && from + 1 < src_.size() && src_[from + 1] == '-') {
        while (from < src_.size() && src_[from] != '\n') ++from;
      } else if (c == '/' && from + 1 < src_.size() && src_[from + 1] == '*') {
        auto close = src_.find("*/", from + 2);
        if (close == std::string_view::npos) return src_.size();
        from = close + 2;
      } else {
        return from;
      }
    }
    return src_.size();
  }

  void push(TokenKind kind, std::string text, std::size_t begin, bool quoted = false) {
    Token t;
    t.kind = kind;
    t.upper = to_upper(text);
    t.text = std::move(text);
    t.quoted = quoted;
    out_.tokens.push_back(std::move(t));
    out_.spans.push_back({begin, pos_});
  }

  [[nodiscard]] bool prev_is_dot() const {
    return !out_.tokens.empty() && out_.tokens.back().is_punct('.');
  }

  std::string read_quoted(char close) {
    std::size_t begin = pos_;
    ++pos_;
    std::string body;
    while (true) {
      if (pos_ >= src_.size()) {
        throw Error(ErrorCode::UnterminatedString,
                    "quote opened at offset " + std::to_string(begin) + " is never closed");
      }
      char c = src_[pos_++];
      if (c == close) {
        // SQL escapes a quote by doubling it; brackets cannot be escaped.
        if (close != ']' && peek() == close) {
          body.push_back(close);
          ++pos_;
          continue;
        }
        return body;
      }
      body.push_back(c);
    }
  }

  void lex_word() {
    std::size_t begin = pos_;
    while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::string word(src_.substr(begin, pos_ - begin));
    std::string up = to_upper(word);
    const std::size_t at = next_significant_pos(pos_);
    const char next = at < src_.size() ? src_[at] : '\0';
    const bool dot_follows = next == '.' && !(at + 1 < src_.size() && is_digit(src_[at + 1]));
    if (prev_is_dot() || dot_follows) {
      push(TokenKind::Identifier, std::move(word), begin);
    } else if (up == "NULL") {
      push(TokenKind::NullLiteral, std::move(word), begin);
    } else if (up == "TRUE" || up == "FALSE") {
      push(TokenKind::BooleanLiteral, std::move(word), begin);
    } else if (is_sqlite_keyword(up) || (next == '(' && is_function_name(up))) {
      push(TokenKind::Keyword, std::move(word), begin);
    } else {
      push(TokenKind::Identifier, std::move(word), begin);
    }
  }

  void lex_number() {
    std::size_t begin = pos_;
    if (src_[pos_] == '0' && (peek(1) == 'x' || peek(1) == 'X') &&
        std::isxdigit(static_cast<unsigned char>(peek(2))) != 0) {
      pos_ += 2;
      while (std::isxdigit(static_cast<unsigned char>(peek())) != 0) ++pos_;
    } else {
      while (is_digit(peek())) ++pos_;
      if (peek() == '.') {
        ++pos_;
        while (is_digit(peek())) ++pos_;
      }
      if ((peek() == 'e' || peek() == 'E') &&
          (is_digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && is_digit(peek(2))))) {
        pos_ += 2;
        while (is_digit(peek())) ++pos_;
      }
    }
    push(TokenKind::NumberLiteral, std::string(src_.substr(begin, pos_ - begin)), begin);
  }

  void lex_one() {
    const std::size_t begin = pos_;
    const char c = src_[pos_];
    const auto uc = static_cast<unsigned char>(c);

    if (c == '\'') {
      std::string body = read_quoted('\'');
      TokenKind kind = is_date_shaped(body) ? TokenKind::DateLiteral : TokenKind::StringLiteral;
      push(kind, std::move(body), begin);
      return;
    }
    if (c == '"' || c == '`') {
      push(TokenKind::Identifier, read_quoted(c), begin, true);
      return;
    }
    if (c == '[') {
      push(TokenKind::Identifier, read_quoted(']'), begin, true);
      return;
    }
    if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
      lex_number();
      return;
    }
    if (is_ident_start(uc)) {
      lex_word();
      return;
    }
    if (c == '?') {
      ++pos_;
      while (is_digit(peek())) ++pos_;
      push(TokenKind::Param, std::string(src_.substr(begin, pos_ - begin)), begin);
      return;
    }
    if ((c == ':' || c == '@' || c == '$') && is_ident_start(static_cast<unsigned char>(peek(1)))) {
      ++pos_;
      while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      push(TokenKind::Param, std::string(src_.substr(begin, pos_ - begin)), begin);
      return;
    }
    if (c == '*') {
      ++pos_;
      push(TokenKind::Star, "*", begin);
      return;
    }
    if (c == '(' || c == ')' || c == ',' || c == '.') {
      ++pos_;
      push(TokenKind::Punct, std::string(1, c), begin);
      return;
    }
    static constexpr std::string_view kMulti[] = {"->>", "->", "||", "<=", ">=", "<>", "!=",
                                                  "==",  "<<", ">>"};
    for (auto op : kMulti) {
      if (src_.substr(pos_, op.size()) == op) {
        pos_ += op.size();
        push(TokenKind::Operator, std::string(op), begin);
        return;
      }
    }
    static constexpr std::string_view kSingle = "=<>+-/%&|~";
    if (kSingle.find(c) != std::string_view::npos) {
      ++pos_;
      push(TokenKind::Operator, std::string(1, c), begin);
      return;
    }
    throw Error(ErrorCode::ParseError,
                "unexpected character '" + std::string(1, c) + "' at offset " +
                    std::to_string(pos_));
  }
};

std::string quote(std::string_view body, char open, char close) {
  std::string out(1, open);
  for (char c : body) {
    out.push_back(c);
    if (c == close) out.push_back(close);
  }
  out.push_back(close);
  return out;
}

}  // namespace

TokenStream lex(std::string_view sql) { return Lexer(sql).run(); }

std::vector<TokenStream> lex_script(std::string_view sql) { return Lexer(sql).run_script(); }

std::string render(const TokenStream& stream) {
  std::string out;
  for (const auto& t : stream) {
    if (!out.empty()) out.push_back(' ');
    switch (t.kind) {
      case TokenKind::StringLiteral:
      case TokenKind::DateLiteral:
        out += quote(t.text, '\'', '\'');
        break;
      case TokenKind::Identifier:
        out += t.quoted ? quote(t.text, '"', '"') : t.text;
        break;
      default:
        out += t.text;
    }
  }
  return out;
}

}  // namespace sqltpl
