#include <doctest.h>

#include <random>

#include "sqltpl/complexity.hpp"
#include "sqltpl/error.hpp"
#include "sqltpl/templatizer.hpp"
#include "test_support.hpp"

using namespace sqltpl;

namespace {

std::array<std::uint32_t, kProxyCount> as_array(const ComplexityProfile& p) {
  std::array<std::uint32_t, kProxyCount> out{};
  for (std::size_t i = 0; i < kProxyCount; ++i) out[i] = p.get(kAllProxies[i]);
  return out;
}

const SchemaCatalog& company() { return test::paper_catalogs().at("company"); }

}  // namespace

TEST_CASE("hand-counted proxy oracle") {
  auto doc = test::load_fixture("proxy_oracle.json");
  REQUIRE(doc["cases"].size() >= 9);
  for (const auto& c : doc["cases"]) {
    CAPTURE(c["name"].get<std::string>());
    const auto& cat = test::paper_catalogs().at(c["db_id"].get<std::string>());
    auto got = as_array(profile(c["sql"].get<std::string>(), cat));
    auto want = c["expect"].get<std::array<std::uint32_t, kProxyCount>>();
    CHECK(got == want);
  }
}

TEST_CASE("individual counters") {
  CHECK(count_joins(lex("SELECT * FROM a, b, c")) == 2);
  CHECK(count_joins(lex("SELECT * FROM a CROSS JOIN b CROSS JOIN c")) == 2);
  CHECK(count_joins(lex("SELECT * FROM a NATURAL LEFT OUTER JOIN b")) == 1);
  CHECK(count_joins(lex("SELECT COUNT(*) FROM subscribers")) == 0);
  CHECK(count_joins(lex("SELECT f(a, b) FROM t WHERE x IN (1, 2)")) == 0);

  auto nested = lex(
      "SELECT a FROM t WHERE x IN (SELECT y FROM t WHERE z > (SELECT AVG(z) FROM t))");
  CHECK(max_nesting_depth(nested) == 2);
  CHECK(count_subqueries(nested) == 2);

  CHECK(count_advanced(lex("SELECT a FROM t UNION SELECT a FROM u")) == 1);
  CHECK(count_advanced(lex("SELECT a FROM t UNION ALL SELECT a FROM u")) == 1);
  CHECK(count_advanced(lex("SELECT name FROM t")) == 0);
  CHECK(count_advanced(lex(
            "SELECT SUM(x) FILTER (WHERE y > 0), RANK() OVER (ORDER BY x), NTILE(4) OVER "
            "(ORDER BY x) FROM t")) == 4);

  CHECK(count_aggs_group_by(lex("SELECT COUNT(DISTINCT a) FROM t")) == 1);
  CHECK(count_aggs_group_by(lex("SELECT SUM(x) OVER (PARTITION BY y) FROM t GROUP BY y")) == 2);
  CHECK(count_aggs_group_by(lex("SELECT name FROM t")) == 0);

  CHECK(count_tables(lex("SELECT * FROM employees a JOIN EMPLOYEES b ON a.id = b.id"),
                     company()) == 1);
  CHECK(count_tables(lex("WITH x AS (SELECT * FROM employees) SELECT * FROM x"), company()) == 1);

  auto one = profile("SELECT 1", company());
  CHECK(one == ComplexityProfile{});
}

TEST_CASE("proxy names round-trip") {
  for (Proxy p : kAllProxies) CHECK(parse_proxy(to_string(p)) == p);
  try {
    parse_proxy("num_columns");
    FAIL("expected UnknownProxy");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownProxy);
  }
}

// ---- properties -------------------------------------------------------------

namespace {

std::string random_query(std::mt19937_64& rng, int depth = 0) {
  auto roll = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  static const char* tables[] = {"employees", "departments", "orders", "customers"};
  static const char* cols[] = {"id", "name", "salary", "amount"};
  std::string q = "SELECT ";
  q += roll(3) == 0 ? std::string("COUNT(*)") : std::string(cols[roll(4)]);
  if (roll(3) == 0) q += ", SUM(" + std::string(cols[roll(4)]) + ") OVER (ORDER BY id)";
  q += " FROM " + std::string(tables[roll(4)]) + " AS a";
  for (int j = 0, n = roll(3); j < n; ++j) {
    q += " JOIN " + std::string(tables[roll(4)]) + " AS b" + std::to_string(j) + " ON a.id = b" +
         std::to_string(j) + ".id";
  }
  if (roll(4) == 0) q += ", orders";
  if (depth < 3 && roll(2) == 0) q += " WHERE a.id IN (" + random_query(rng, depth + 1) + ")";
  if (roll(3) == 0) q += " GROUP BY a.name";
  if (depth == 0 && roll(5) == 0) q += " UNION SELECT 1";
  if (depth == 0 && roll(4) == 0) {
    q = "WITH w AS (SELECT name FROM employees WHERE salary > 10) " + q;
  }
  return q;
}

}  // namespace

TEST_CASE("property: invariants hold on random queries") {
  std::mt19937_64 rng(314);
  for (int i = 0; i < 1000; ++i) {
    const std::string sql = random_query(rng);
    CAPTURE(sql);
    auto p = profile(sql, company());
    CHECK(p.max_nesting_depth <= p.num_subqueries);
    if (p.num_subqueries == 0) CHECK(p.max_nesting_depth == 0);
    CHECK(p.num_tables >= 1);
  }
}

TEST_CASE("property: templatization preserves structural counts") {
  // num_tables is excluded: placeholders erase which tables were distinct.
  std::mt19937_64 rng(2718);
  for (int i = 0; i < 1000; ++i) {
    const std::string sql = random_query(rng);
    CAPTURE(sql);
    auto before = profile(sql, company());
    auto pair = templatize(sql, company());
    auto after = profile(lex(pair.hard.canonical), company());
    CHECK(before.num_joins == after.num_joins);
    CHECK(before.num_subqueries == after.num_subqueries);
    CHECK(before.max_nesting_depth == after.max_nesting_depth);
    CHECK(before.num_aggs_plus_group_by == after.num_aggs_plus_group_by);
    CHECK(before.advanced_feature_count == after.advanced_feature_count);
  }
}

TEST_CASE("property: one extra JOIN adds one join and at most one table") {
  std::mt19937_64 rng(1618);
  static const char* extra[] = {"employees", "departments", "orders", "customers", "audit_log"};
  for (int i = 0; i < 1000; ++i) {
    std::string base = "SELECT a.id FROM employees AS a";
    const int n = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int j = 0; j < n; ++j) {
      base += " JOIN " + std::string(extra[rng() % 5]) + " AS j" + std::to_string(j) +
              " ON a.id = j" + std::to_string(j) + ".id";
    }
    const std::string tail = rng() % 2 ? " WHERE a.salary > 3" : "";
    const std::string added =
        base + " JOIN " + std::string(extra[rng() % 5]) + " AS z ON z.id = a.id" + tail;
    auto p0 = profile(base + tail, company());
    auto p1 = profile(added, company());
    CHECK(p1.num_joins == p0.num_joins + 1);
    CHECK(p1.num_tables >= p0.num_tables);
    CHECK(p1.num_tables <= p0.num_tables + 1);
  }
}
