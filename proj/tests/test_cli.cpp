#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "sqltpl/cli.hpp"
#include "sqltpl/corpus.hpp"
#include "sqltpl/io.hpp"
#include "test_support.hpp"

using namespace sqltpl;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sqltpl");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("sqltpl_cli_" + name);
  fs::remove_all(p);
  return p;
}

const std::string kCatalog = test::fixture_path("paper_catalogs.json");

}  // namespace

TEST_CASE("templatize prints hard then soft") {
  auto doc = test::load_fixture("golden_templates.json");
  const auto& c = doc["cases"][0];
  auto r = cli({"templatize", "--catalog", kCatalog, "--db", c["db_id"], c["sql"]});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(test::strip_ws(ls[0]) == test::strip_ws(c["hard"].get<std::string>()));
  CHECK(test::strip_ws(ls[1]) == test::strip_ws(c["soft"].get<std::string>()));

  auto ex1 = cli({"templatize", "--catalog", kCatalog, "--db", "company",
                  "SELECT name FROM employees WHERE salary > 50000"});
  CHECK(lines(ex1.out).at(1) == "SELECT variable FROM variable WHERE variable > num");
}

TEST_CASE("templatize reads a query file") {
  auto dir = fresh_dir("file");
  fs::create_directories(dir);
  write_file(dir / "q.sql", "SELECT COUNT(*)\nFROM subscribers;\n");
  auto r = cli({"templatize", "--catalog", kCatalog, "--db", "cachet", "--file", (dir / "q.sql").string()});
  CHECK(r.code == 0);
  CHECK(lines(r.out).at(1) == "SELECT COUNT(*) FROM variable");
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  CHECK(cli({"templatize", "SELECT 1"}).code == kExitUsage);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"bogus"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
  auto bad = cli({"templatize", "--catalog", kCatalog, "--db", "company", "SELECT 'open"});
  CHECK(bad.code == kExitData);
  CHECK(bad.err.find("UnterminatedString") != std::string::npos);
  CHECK(cli({"templatize", "--catalog", kCatalog, "--db", "nope", "SELECT 1"}).code == kExitData);
  CHECK(cli({"templatize", "--catalog", "/no/such/path", "SELECT 1"}).code == kExitData);
  CHECK(cli({"coverage", "--records", test::fixture_path("tiny_records.jsonl"), "--catalog", kCatalog,
             "--targets", "0,50"})
            .code == kExitUsage);
}

TEST_CASE("environment variables stand in for flags") {
  ::setenv("SQLTPL_CATALOG", kCatalog.c_str(), 1);
  ::setenv("SQLTPL_DB", "company", 1);
  auto r = cli({"templatize", "SELECT name FROM employees"});
  ::unsetenv("SQLTPL_CATALOG");
  ::unsetenv("SQLTPL_DB");
  CHECK(r.code == 0);
  CHECK(lines(r.out).at(0) == "SELECT col_name FROM table_name");
}

TEST_CASE("profile prints the six proxies") {
  auto r = cli({"profile", "--catalog", kCatalog, "--db", "cachet",
                "SELECT COUNT(*) FROM actions a LEFT JOIN components b ON a.taggable_id = b.id"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["num_tables"] == 2);
  CHECK(j["num_joins"] == 1);
  CHECK(j["num_aggs_plus_group_by"] == 1);
  CHECK(j.size() == 6);
}

TEST_CASE("analyze writes every artifact, deterministically") {
  auto a = fresh_dir("analyze_a");
  auto b = fresh_dir("analyze_b");
  const auto records = test::fixture_path("tiny_records.jsonl");
  auto r1 = cli({"analyze", "--records", records, "--catalog", kCatalog, "--out", a.string(), "--seed", "5"});
  auto r2 = cli({"analyze", "--records", records, "--catalog", kCatalog, "--out", b.string(), "--seed", "5"});
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  for (const char* name : {"spectrum.csv", "coverage.csv", "loglog.csv", "spearman.csv",
                           "moving_avg_num_joins.csv", "proxy_by_group.csv"}) {
    CAPTURE(name);
    auto text = read_file(a / name);
    auto ls = lines(text);
    REQUIRE(ls.size() >= 2);
    const auto columns = std::count(ls[0].begin(), ls[0].end(), ',');
    CHECK(columns >= 3);
    CHECK(text == read_file(b / name));
  }
  for (const char* name : {"fit.json", "summary.json", "inventory_soft.json"}) {
    CAPTURE(name);
    const auto text = read_file(a / name);
    CHECK(nlohmann::json::accept(text));
    CHECK(read_file(a / name) == read_file(b / name));
  }
  auto summary = nlohmann::json::parse(read_file(a / "summary.json"));
  CHECK(summary["version"] == 1);
  CHECK(summary["csv_headers"]["coverage.csv"] ==
        "level,target_pct,templates_needed,template_pct,queries_covered");
  CHECK(summary["levels"]["SOFT"]["total_queries"] == 5);
  CHECK(read_file(a / "failures.jsonl").empty());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("analyze records a bad row and still succeeds") {
  auto dir = fresh_dir("analyze_bad");
  auto r = cli({"analyze", "--records", test::fixture_path("tiny_records_bad_row.jsonl"), "--catalog",
                kCatalog, "--out", dir.string()});
  REQUIRE(r.code == 0);
  auto ls = lines(read_file(dir / "failures.jsonl"));
  REQUIRE(ls.size() == 1);
  CHECK(nlohmann::json::parse(ls[0])["id"] == "t6");
  fs::remove_all(dir);
}

TEST_CASE("analyze leaves nothing behind when it fails") {
  auto dir = fresh_dir("analyze_fail");
  auto recs = dir.string() + "_records.jsonl";
  write_file(recs, "{\"db_id\":\"nowhere\",\"sql\":\"SELECT 1\"}\n");
  auto r = cli({"analyze", "--records", recs, "--catalog", kCatalog, "--out", dir.string()});
  CHECK(r.code == kExitData);
  CHECK_FALSE(fs::exists(dir));
  fs::remove(recs);
}

TEST_CASE("analyze output does not depend on thread count") {
  auto dir = fresh_dir("analyze_threads");
  fs::create_directories(dir);
  std::string jsonl;
  for (const auto& r : test::synthetic_corpus(600, 21)) jsonl += record_to_json(r) + "\n";
  write_file(dir / "records.jsonl", jsonl);
  auto run = [&](const char* threads, const char* sub) {
    return cli({"analyze", "--records", (dir / "records.jsonl").string(), "--catalog", kCatalog,
                "--out", (dir / sub).string(), "--resamples", "100", "--threads", threads});
  };
  REQUIRE(run("1", "one").code == 0);
  REQUIRE(run("3", "three").code == 0);
  for (const auto& e : fs::directory_iterator(dir / "one")) {
    CAPTURE(e.path().filename().string());
    CHECK(read_file(e.path()) == read_file(dir / "three" / e.path().filename()));
  }
  auto fit = nlohmann::json::parse(read_file(dir / "one" / "fit.json"));
  CHECK(fit["levels"]["SOFT"]["gof"].contains("p_value"));
  fs::remove_all(dir);
}

TEST_CASE("ingest, match, coverage and fit") {
  auto dir = fresh_dir("match");
  std::string jsonl;
  for (const auto& r : test::synthetic_corpus(400, 8)) jsonl += record_to_json(r) + "\n";
  fs::create_directories(dir);
  write_file(dir / "records.jsonl", jsonl);
  auto ing = cli({"ingest", "--records", (dir / "records.jsonl").string(), "--catalog", kCatalog,
                  "--out", (dir / "inv").string()});
  REQUIRE(ing.code == 0);
  const auto inv_path = (dir / "inv" / "inventory_soft.json").string();
  auto inv = load_inventory(inv_path);
  const std::string top = inv.ranked().front().first;
  CHECK(top == "SELECT COUNT(*) FROM variable");

  auto hit = cli({"match", "--catalog", kCatalog, "--db", "shop", "--inventory", inv_path,
                  "SELECT count(*) FROM orders"});
  REQUIRE(hit.code == 0);
  auto j = nlohmann::json::parse(hit.out);
  CHECK(j["hit"] == true);
  CHECK(j["rank"] == 1);
  CHECK(j["frequency"] == inv.ranked().front().second->count);

  auto miss = cli({"match", "--catalog", kCatalog, "--db", "shop", "--inventory", inv_path,
                   "SELECT a FROM b EXCEPT SELECT c FROM d"});
  CHECK(nlohmann::json::parse(miss.out)["hit"] == false);
  CHECK_FALSE(nlohmann::json::parse(miss.out).contains("rank"));

  CHECK(cli({"match", "--catalog", kCatalog, "--db", "shop", "--inventory", inv_path, "SELECT 'x"})
            .code == kExitData);
  CHECK(cli({"match", "--catalog", kCatalog, "--db", "shop", "--inventory", inv_path, "--level",
             "hard", "SELECT 1"})
            .code == kExitData);

  auto cov = cli({"coverage", "--inventory", inv_path, "--targets", "50,100"});
  REQUIRE(cov.code == 0);
  CHECK(lines(cov.out).size() == 3);

  auto fit = cli({"fit", "--inventory", inv_path, "--resamples", "0"});
  REQUIRE(fit.code == 0);
  CHECK(nlohmann::json::parse(fit.out)["alpha"].get<double>() > 0.0);
  fs::remove_all(dir);
}

TEST_CASE("convert a Spider-style dataset") {
  auto dir = fresh_dir("convert");
  auto r = cli({"convert", "--tables", test::fixture_path("spider_tables_sample.json"), "--dataset",
                test::fixture_path("spider_train_sample.json"), "--out", dir.string()});
  REQUIRE(r.code == 0);
  auto catalogs = load_catalog_set(dir / "catalogs.json");
  CHECK(catalogs.count("concert_singer") == 1);
  auto res = ingest(dir / "records.jsonl", catalogs);
  CHECK(res.failures.empty());
  CHECK(res.records_read == 6);
  CHECK(res.soft.find("SELECT COUNT(*) FROM variable")->count == 2);
  CHECK(res.profiles[0].source == "spider_train_sample");
  fs::remove_all(dir);
}
