#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "sqltpl/corpus.hpp"
#include "sqltpl/io.hpp"
#include "test_support.hpp"

using namespace sqltpl;
namespace fs = std::filesystem;

namespace {

QueryRecord rec(std::string id, std::string db, std::string sql) {
  QueryRecord r;
  r.id = std::move(id);
  r.db_id = std::move(db);
  r.sql = std::move(sql);
  return r;
}

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("sqltpl_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TemplateInventory inventory_of(const std::vector<std::pair<std::string, int>>& counts,
                               Level level = Level::Soft) {
  TemplateInventory inv(level);
  int id = 0;
  for (const auto& [t, c] : counts) {
    for (int i = 0; i < c; ++i) inv.add(t, {}, "r" + std::to_string(id++));
  }
  return inv;
}

}  // namespace

TEST_CASE("ingest counts shared soft templates") {
  std::vector<QueryRecord> records = {
      rec("a", "company", "SELECT name FROM employees WHERE salary > 50000"),
      rec("b", "company", "SELECT id FROM departments WHERE id > 3"),
      rec("c", "company", "SELECT COUNT(*) FROM employees"),
  };
  auto res = ingest_records(records, test::paper_catalogs());
  CHECK(res.failures.empty());
  REQUIRE(res.soft.size() == 2);
  auto ranked = res.soft.ranked();
  CHECK(ranked[0].first == "SELECT variable FROM variable WHERE variable > num");
  CHECK(ranked[0].second->count == 2);
  CHECK(ranked[1].second->count == 1);
  CHECK(res.soft.total_queries() == 3);
  CHECK(res.profiles.size() == 3);
  CHECK(ranked[0].second->examples == std::vector<std::string>{"a", "b"});
}

TEST_CASE("unknown databases and bad SQL are recorded, not fatal") {
  std::vector<QueryRecord> records = {
      rec("a", "nowhere", "SELECT 1"),
      rec("b", "company", "SELECT 'open"),
      rec("c", "company", "SELECT name FROM employees"),
  };
  auto res = ingest_records(records, test::paper_catalogs());
  REQUIRE(res.failures.size() == 2);
  CHECK(res.failures[0].code == ErrorCode::MissingCatalog);
  CHECK(res.failures[0].record_id == "a");
  CHECK(res.failures[1].code == ErrorCode::UnterminatedString);
  CHECK(res.hard.total_queries() == 1);
}

TEST_CASE("the two most frequent soft templates from the study") {
  std::vector<QueryRecord> records = {
      rec("1", "company", "SELECT name FROM employees WHERE department = 'HR'"),
      rec("2", "shop", "SELECT email FROM customers WHERE name = 'Ann'"),
      rec("3", "cachet", "SELECT COUNT(*) FROM subscribers"),
      rec("4", "shop", "SELECT COUNT(*) FROM orders"),
  };
  auto res = ingest_records(records, test::paper_catalogs());
  CHECK(res.soft.find("SELECT variable FROM variable WHERE variable = string") != nullptr);
  CHECK(res.soft.find("SELECT COUNT(*) FROM variable") != nullptr);
  CHECK(res.soft.size() == 2);
}

TEST_CASE("parse_records handles format errors per line") {
  std::vector<IngestFailure> failures;
  std::vector<std::size_t> lines;
  auto recs = parse_records(
      "{\"db_id\":\"company\",\"sql\":\"SELECT 1\"}\n"
      "not json\n"
      "\n"
      "{\"db_id\":\"company\"}\n"
      "{\"db_id\":\"company\",\"sql\":\"SELECT 2\",\"id\":7,\"difficulty\":\"Hard\"}\r\n",
      failures, &lines);
  REQUIRE(recs.size() == 2);
  CHECK(lines == std::vector<std::size_t>{1, 5});
  CHECK(recs[0].id == default_record_id("company", "SELECT 1"));
  CHECK(recs[0].id.size() == std::string("company:").size() + 16);
  CHECK(recs[1].id == "7");
  CHECK(recs[1].difficulty == "difficult");
  REQUIRE(failures.size() == 2);
  CHECK(failures[0].line == 2);
  CHECK(failures[1].line == 4);
  CHECK(failures[1].code == ErrorCode::FormatError);

  std::vector<IngestFailure> f2;
  CHECK_THROWS_AS(parse_records("nope\n{bad", f2), Error);
  try {
    parse_records("\n  \n", f2);
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyInput);
  }
}

TEST_CASE("record JSON round trip") {
  QueryRecord r = rec("x1", "shop", "SELECT \"a\" FROM t WHERE b = 'q'");
  r.nlq = "what?";
  r.source = "spider";
  r.difficulty = "medium";
  std::vector<IngestFailure> failures;
  auto back = parse_records(record_to_json(r), failures);
  REQUIRE(back.size() == 1);
  CHECK(back[0].id == r.id);
  CHECK(back[0].sql == r.sql);
  CHECK(back[0].nlq == r.nlq);
  CHECK(back[0].difficulty == r.difficulty);
}

TEST_CASE("match reports dense rank") {
  auto inv = inventory_of({{"SELECT COUNT(*) FROM variable", 5},
                           {"SELECT variable FROM variable", 5},
                           {"SELECT variable FROM variable WHERE variable > num", 2}});
  auto m = match("SELECT COUNT(*) FROM subscribers", test::paper_catalogs().at("cachet"), inv);
  CHECK(m.hit);
  CHECK(m.rank == 1u);
  CHECK(m.frequency == 5u);
  auto tie = match("SELECT id FROM actions", test::paper_catalogs().at("cachet"), inv);
  CHECK(tie.rank == 1u);
  auto third = match("SELECT id FROM actions WHERE id > 4", test::paper_catalogs().at("cachet"), inv);
  CHECK(third.rank == 2u);
  auto miss = match("SELECT 1", test::paper_catalogs().at("cachet"), TemplateInventory(Level::Soft));
  CHECK_FALSE(miss.hit);
  CHECK_FALSE(miss.rank.has_value());
  CHECK_THROWS_AS(match("SELECT 'x", test::paper_catalogs().at("cachet"), inv), Error);
}

TEST_CASE("inventory persistence") {
  auto dir = temp_dir("inventory");
  auto inv = inventory_of({{"A", 3}, {"B", 1}, {"C", 2}}, Level::Hard);
  save_inventory(inv, dir / "inv.json");
  CHECK(load_inventory(dir / "inv.json") == inv);

  // Entries are written by descending count.
  auto text = read_file(dir / "inv.json");
  CHECK(text.find("\"A\"") < text.find("\"C\""));
  CHECK(text.find("\"C\"") < text.find("\"B\""));

  write_file(dir / "bad.json", "{\"format\": \"sqltpl-inventory\", ");
  try {
    load_inventory(dir / "bad.json");
    FAIL("expected FormatError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FormatError);
  }
  auto tampered = text;
  tampered.replace(tampered.find("\"total_queries\": 6"), 18, "\"total_queries\": 7");
  CHECK_THROWS_AS(inventory_from_json(tampered), Error);
  try {
    load_inventory(dir / "missing.json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
  fs::remove_all(dir);
}

TEST_CASE("merge adds counts and refuses mixed levels") {
  auto a = inventory_of({{"A", 2}, {"B", 1}});
  auto b = inventory_of({{"B", 4}, {"C", 1}});
  a.merge(b);
  CHECK(a.total_queries() == 8);
  CHECK(a.find("B")->count == 5);
  TemplateInventory hard(Level::Hard);
  try {
    a.merge(hard);
    FAIL("expected LevelMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LevelMismatch);
  }
}

TEST_CASE("ingest from files with line-numbered failures") {
  auto res = ingest(test::fixture_path("tiny_records_bad_row.jsonl"),
                    test::fixture_path("paper_catalogs.json"));
  CHECK(res.records_read == 6);
  REQUIRE(res.failures.size() == 1);
  CHECK(res.failures[0].line == 6);
  CHECK(res.failures[0].record_id == "t6");
  CHECK(res.soft.total_queries() == 5);
  CHECK(res.soft.find("SELECT COUNT(*) FROM variable")->count == 2);
}

TEST_CASE("dedup keeps one of each byte-identical query") {
  std::vector<QueryRecord> records = {
      rec("z", "company", "SELECT name FROM employees"),
      rec("a", "company", "SELECT name FROM employees"),
      rec("m", "shop", "SELECT name FROM employees"),
  };
  IngestOptions opts;
  opts.dedup = true;
  auto res = ingest_records(records, test::paper_catalogs(), opts);
  CHECK(res.duplicates_dropped == 1);
  CHECK(res.hard.total_queries() == 2);
  REQUIRE(res.profiles.size() == 2);
  CHECK(res.profiles[0].id == "a");
}

TEST_CASE("Spider dataset conversion") {
  auto recs = convert_spider_records(
      R"([{"db_id":"concert_singer","question":"How many singers?","query":"SELECT count(*) FROM singer"},
          {"db_id":"x","question":"q","SQL":"SELECT 1","difficulty":"moderate"}])",
      "spider_train");
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].id == "spider_train-00000");
  CHECK(recs[0].sql == "SELECT count(*) FROM singer");
  CHECK(recs[1].sql == "SELECT 1");
  CHECK(recs[1].difficulty == "medium");
  CHECK_THROWS_AS(convert_spider_records("{}", "s"), Error);
}

// ---- properties ---------------------------------------------------------------

TEST_CASE("property: permutation invariance, additivity, dominance, threading") {
  const auto records = test::synthetic_corpus(1000, 11);
  IngestOptions single;
  single.threads = 1;
  const auto base = ingest_records(records, test::paper_catalogs(), single);
  CHECK(base.failures.empty());
  CHECK(base.soft.size() <= base.hard.size());
  CHECK(base.soft.size() > 10);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    auto shuffled = records;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    IngestOptions opts;
    opts.threads = 4;
    auto res = ingest_records(shuffled, test::paper_catalogs(), opts);
    CHECK(res.hard == base.hard);
    CHECK(res.soft == base.soft);

    const std::size_t cut = std::uniform_int_distribution<std::size_t>(0, shuffled.size())(rng);
    std::vector<QueryRecord> left(shuffled.begin(), shuffled.begin() + static_cast<long>(cut));
    std::vector<QueryRecord> right(shuffled.begin() + static_cast<long>(cut), shuffled.end());
    TemplateInventory hard(Level::Hard), soft(Level::Soft);
    for (const auto* part : {&right, &left}) {
      if (part->empty()) continue;
      auto r = ingest_records(*part, test::paper_catalogs());
      hard.merge(r.hard);
      soft.merge(r.soft);
    }
    CHECK(hard == base.hard);
    CHECK(soft == base.soft);
  }
}
