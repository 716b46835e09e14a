#include <doctest.h>

#include <algorithm>
#include <random>

#include "sqltpl/error.hpp"
#include "sqltpl/lexer.hpp"
#include "test_support.hpp"

using namespace sqltpl;

namespace {

std::vector<std::pair<TokenKind, std::string>> kinds_and_text(const TokenStream& ts) {
  std::vector<std::pair<TokenKind, std::string>> out;
  for (const auto& t : ts) out.emplace_back(t.kind, t.text);
  return out;
}

ErrorCode lex_error(std::string_view sql) {
  try {
    lex(sql);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a lexer error for: " << sql);
  return ErrorCode::InvalidArgument;
}

// Random statements assembled from fragments that exercise quoting,
// comments, numbers and operators.
std::string random_statement(std::mt19937_64& rng) {
  static const std::vector<std::string> frags = {
      "SELECT", "select", "FROM", "where", "t1", "\"Quoted Name\"", "[br ack]", "`tick`",
      "'it''s'", "'2021-03-04'", "'2021-03-04 10:11'", "42", "3.5e-2", ".5", "0x1F", "NULL",
      "TRUE", "false", "COUNT", "(", ")", "*", ",", "a.b", "T1.key", "<>", "!=", "<=", "||",
      "-", "+", "?", ":name", "@v", "date", "AVG(x)", "/* c */", "-- line\n", "JOIN", "ON",
      "GROUP BY", "ORDER BY", "LIMIT", "CASE WHEN", "END", "IN", "'x--y'", "replace"};
  std::uniform_int_distribution<std::size_t> pick(0, frags.size() - 1);
  std::uniform_int_distribution<int> len(1, 25);
  std::uniform_int_distribution<int> ws(0, 3);
  std::string s = "SELECT";
  int n = len(rng);
  for (int i = 0; i < n; ++i) {
    static const char* spaces[] = {" ", "  ", "\n", "\t "};
    s += spaces[ws(rng)];
    s += frags[pick(rng)];
  }
  return s;
}

}  // namespace

TEST_CASE("lex classifies a simple selection") {
  auto ts = lex("SELECT name FROM employees WHERE salary > 50000");
  using K = TokenKind;
  std::vector<std::pair<K, std::string>> expected = {
      {K::Keyword, "SELECT"},   {K::Identifier, "name"},   {K::Keyword, "FROM"},
      {K::Identifier, "employees"}, {K::Keyword, "WHERE"}, {K::Identifier, "salary"},
      {K::Operator, ">"},       {K::NumberLiteral, "50000"}};
  CHECK(kinds_and_text(ts) == expected);
  CHECK(ts.spans.size() == ts.size());
  CHECK(ts.spans[3].begin == 17);
  CHECK(ts.spans[3].end == 26);
}

TEST_CASE("comments and trailing semicolons are stripped") {
  auto ts = lex("SELECT 1 -- comment");
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].is_keyword("SELECT"));
  CHECK(ts[1].kind == TokenKind::NumberLiteral);

  auto ts2 = lex("/* head */ SELECT /* mid */ a\n\n\nFROM t; -- tail\n ;");
  CHECK(ts2.size() == 4);
}

TEST_CASE("string literals drop quotes and unescape") {
  auto ts = lex("SELECT * FROM t WHERE location = 'NY' AND note = 'it''s'");
  auto it = std::find_if(ts.begin(), ts.end(),
                         [](const Token& t) { return t.kind == TokenKind::StringLiteral; });
  REQUIRE(it != ts.end());
  CHECK(it->text == "NY");
  CHECK(ts.tokens.back().text == "it's");
}

TEST_CASE("quoted names are identifiers") {
  auto ts = lex("SELECT \"first name\", [order], `select` FROM t");
  CHECK(ts[1].kind == TokenKind::Identifier);
  CHECK(ts[1].text == "first name");
  CHECK(ts[1].quoted);
  CHECK(ts[3].kind == TokenKind::Identifier);
  CHECK(ts[3].text == "order");
  CHECK(ts[5].kind == TokenKind::Identifier);
  CHECK(ts[5].text == "select");
}

TEST_CASE("function names are keywords only when called") {
  auto ts = lex("SELECT date, DATE(created), t.count FROM t");
  CHECK(ts[1].kind == TokenKind::Identifier);
  CHECK(ts[3].kind == TokenKind::Keyword);
  CHECK(ts[3].upper == "DATE");
  CHECK(ts[10].kind == TokenKind::Identifier);  // after '.'
  auto spaced = lex("SELECT COUNT (*) FROM t");
  CHECK(spaced[1].kind == TokenKind::Keyword);
}

TEST_CASE("literal keywords") {
  auto ts = lex("SELECT TRUE, false, NULL, * FROM t");
  CHECK(ts[1].kind == TokenKind::BooleanLiteral);
  CHECK(ts[3].kind == TokenKind::BooleanLiteral);
  CHECK(ts[5].kind == TokenKind::NullLiteral);
  CHECK(ts[7].kind == TokenKind::Star);
}

TEST_CASE("parameters and operators") {
  auto ts = lex("SELECT a FROM t WHERE b >= ?1 AND c <> :x AND d || @y != $z");
  std::vector<std::string> params;
  for (const auto& t : ts) {
    if (t.kind == TokenKind::Param) params.push_back(t.text);
  }
  CHECK(params == std::vector<std::string>{"?1", ":x", "@y", "$z"});
  CHECK(ts[6].text == ">=");
}

TEST_CASE("lexer errors") {
  CHECK(lex_error("SELECT 'abc") == ErrorCode::UnterminatedString);
  CHECK(lex_error("SELECT \"abc") == ErrorCode::UnterminatedString);
  CHECK(lex_error("SELECT 1 /* never closed") == ErrorCode::UnterminatedComment);
  CHECK(lex_error("") == ErrorCode::EmptyInput);
  CHECK(lex_error("  -- only a comment\n") == ErrorCode::EmptyInput);
  CHECK(lex_error("SELECT 1; SELECT 2") == ErrorCode::MultipleStatements);
  CHECK(lex_error("SELECT # FROM t") == ErrorCode::ParseError);
}

TEST_CASE("classify_literal follows the placeholder mapping") {
  CHECK(classify_literal("50000") == LiteralType::Num);
  CHECK(classify_literal("3.25") == LiteralType::Num);
  CHECK(classify_literal("'NY'") == LiteralType::String);
  CHECK(classify_literal("'2021-03-04'") == LiteralType::Date);
  CHECK(classify_literal("TRUE") == LiteralType::Boolean);
  CHECK(classify_literal("false") == LiteralType::Boolean);
  CHECK(classify_literal("NULL") == LiteralType::Others);
  CHECK(placeholder(LiteralType::Others) == "others");
  CHECK(placeholder(LiteralType::Jsonb) == "jsonb");
  CHECK_THROWS_AS(classify_literal("salary"), Error);
  CHECK_THROWS_AS(classify_literal("'a' 'b'"), Error);
}

TEST_CASE("date shape accepts ISO dates and rejects near misses") {
  for (const char* ok : {"2021-03-04", "1999-12-31", "2021-03-04 10:11", "2021-03-04 10:11:12",
                         "0000-00-00"}) {
    CHECK_MESSAGE(is_date_shaped(ok), ok);
  }
  for (const char* bad : {"2021-3-04", "21-03-04", "2021/03/04", "2021-03-04T10:11",
                          "2021-03-04 10", "2021-03-04 10:11:1", "2021-03-04 10:11:12.5",
                          "March 4, 2021", "20210304", ""}) {
    CHECK_MESSAGE(!is_date_shaped(bad), bad);
  }
  CHECK(lex("SELECT '2021-03-04 10:11:12'")[1].kind == TokenKind::DateLiteral);
  CHECK(lex("SELECT '2021-03-04x'")[1].kind == TokenKind::StringLiteral);
}

TEST_CASE("keyword tables are sorted for binary search") {
  CHECK(std::is_sorted(sqlite_keywords().begin(), sqlite_keywords().end()));
  CHECK(std::is_sorted(function_names().begin(), function_names().end()));
  CHECK(sqlite_keywords().size() == 147);
}

TEST_CASE("property: render then lex is the identity on kinds and text") {
  std::mt19937_64 rng(20240611);
  for (int iter = 0; iter < 2000; ++iter) {
    std::string sql = random_statement(rng);
    TokenStream first;
    try {
      first = lex(sql);
    } catch (const Error&) {
      continue;
    }
    auto second = lex(render(first));
    REQUIRE_MESSAGE(kinds_and_text(first) == kinds_and_text(second), sql);
  }
}

TEST_CASE("property: keyword closure and comment elimination") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 2000; ++iter) {
    std::string sql = random_statement(rng);
    TokenStream ts;
    try {
      ts = lex(sql);
    } catch (const Error&) {
      continue;
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const Token& t = ts[i];
      if (t.kind == TokenKind::Keyword) {
        CHECK((is_sqlite_keyword(t.upper) || is_function_name(t.upper)));
      }
      const bool dotted = (i > 0 && ts[i - 1].is_punct('.')) ||
                          (i + 1 < ts.size() && ts[i + 1].is_punct('.'));
      if (t.kind == TokenKind::Identifier && !t.quoted && !dotted) {
        CHECK_FALSE(is_sqlite_keyword(t.upper));
        const bool called = i + 1 < ts.size() && ts[i + 1].is_punct('(');
        CHECK_FALSE((called && is_function_name(t.upper)));
      }
      if (t.kind != TokenKind::StringLiteral) {
        CHECK(t.text.find("--") == std::string::npos);
        CHECK(t.text.find("/*") == std::string::npos);
      }
    }
  }
}

TEST_CASE("lex_script splits statements") {
  auto stmts = lex_script("CREATE TABLE a (x); ; CREATE TABLE b (y, 'semi;colon');");
  REQUIRE(stmts.size() == 2);
  CHECK(stmts[1].tokens.back().is_punct(')'));
  CHECK(lex_script("  -- nothing\n").empty());
}
