#include "sqltpl/schema.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unordered_set>

#include "sqltpl/error.hpp"
#include "sqltpl/io.hpp"
#include "sqltpl/lexer.hpp"

namespace sqltpl {

using ordered_json = nlohmann::ordered_json;

void SchemaCatalog::add_table(std::string name, std::vector<std::string> columns) {
  std::string key = to_upper(name);
  if (table_index_.contains(key)) {
    throw Error(ErrorCode::DuplicateTable,
                "table '" + name + "' defined twice in catalog '" + db_id_ + "'");
  }
  table_index_.emplace(std::move(key), tables_.size());
  std::unordered_set<std::string> seen;
  for (const auto& c : columns) {
    auto up = to_upper(c);
    if (seen.insert(up).second) ++column_refcount_[up];
  }
  tables_.push_back({std::move(name), std::move(columns)});
}

bool SchemaCatalog::has_table(std::string_view name) const {
  return table_index_.contains(to_upper(name));
}

bool SchemaCatalog::has_column(std::string_view name) const {
  return column_refcount_.contains(to_upper(name));
}

const TableDef* SchemaCatalog::find_table(std::string_view name) const {
  auto it = table_index_.find(to_upper(name));
  return it == table_index_.end() ? nullptr : &tables_[it->second];
}

std::vector<std::string> SchemaCatalog::all_columns() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& t : tables_) {
    for (const auto& c : t.columns) {
      if (seen.insert(to_upper(c)).second) out.push_back(c);
    }
  }
  return out;
}

NameClass lookup(const SchemaCatalog& catalog, std::string_view name, Clause position) {
  const bool table = catalog.has_table(name);
  const bool column = catalog.has_column(name);
  if (position == Clause::From) {
    if (table) return NameClass::Table;
    if (column) return NameClass::Column;
  } else {
    if (column) return NameClass::Column;
    if (table) return NameClass::Table;
  }
  return NameClass::Unknown;
}

namespace {

SchemaCatalog catalog_from_json(const ordered_json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "catalog must be a JSON object");
  auto db = doc.find("db_id");
  if (db == doc.end() || !db->is_string()) {
    throw Error(ErrorCode::ParseError, "catalog needs a string \"db_id\"");
  }
  auto tables = doc.find("tables");
  if (tables == doc.end() || !tables->is_object()) {
    throw Error(ErrorCode::ParseError, "catalog needs a \"tables\" object");
  }
  SchemaCatalog cat(db->get<std::string>());
  for (const auto& [name, cols] : tables->items()) {
    if (!cols.is_array()) {
      throw Error(ErrorCode::ParseError, "columns of table '" + name + "' must be an array");
    }
    std::vector<std::string> columns;
    for (const auto& c : cols) {
      if (!c.is_string()) {
        throw Error(ErrorCode::ParseError, "column names of '" + name + "' must be strings");
      }
      columns.push_back(c.get<std::string>());
    }
    cat.add_table(name, std::move(columns));
  }
  if (cat.empty()) throw Error(ErrorCode::EmptyCatalog, "catalog '" + cat.db_id() + "' has no tables");
  return cat;
}

// nlohmann silently keeps the last of two identical object keys, so table
// names are collected during parsing to catch exact duplicates too.
ordered_json parse_checked(std::string_view text) {
  std::vector<std::unordered_set<std::string>> table_keys;
  std::string top_key;
  int array_depth = 0;
  auto cb = [&](int depth, ordered_json::parse_event_t ev, ordered_json& parsed) {
    using E = ordered_json::parse_event_t;
    if (ev == E::array_start) ++array_depth;
    if (ev == E::array_end) --array_depth;
    if (ev != E::key) return true;
    const int base = array_depth > 0 && depth >= 2 ? 1 : 0;  // catalogs inside a top-level array
    if (depth == base + 1) {
      top_key = parsed.get<std::string>();
      if (top_key == "tables") table_keys.emplace_back();
    } else if (depth == base + 2 && top_key == "tables" && !table_keys.empty()) {
      auto name = parsed.get<std::string>();
      if (!table_keys.back().insert(to_upper(name)).second) {
        throw Error(ErrorCode::DuplicateTable, "table '" + name + "' defined twice");
      }
    }
    return true;
  };
  try {
    return ordered_json::parse(text.begin(), text.end(), cb);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace

SchemaCatalog parse_catalog_json(std::string_view text) {
  return catalog_from_json(parse_checked(text));
}

SchemaCatalog load_catalog_json(const std::filesystem::path& path) {
  return parse_catalog_json(read_file(path));
}

std::string catalog_to_json(const SchemaCatalog& catalog) {
  ordered_json doc;
  doc["db_id"] = catalog.db_id();
  ordered_json tables = ordered_json::object();
  for (const auto& t : catalog.tables()) tables[t.name] = t.columns;
  doc["tables"] = std::move(tables);
  return doc.dump(2);
}

namespace {

bool is_table_constraint(const Token& t) {
  return t.kind == TokenKind::Keyword &&
         (t.upper == "CONSTRAINT" || t.upper == "PRIMARY" || t.upper == "UNIQUE" ||
          t.upper == "CHECK" || t.upper == "FOREIGN");
}

bool is_name_token(const Token& t) {
  return t.kind == TokenKind::Identifier || t.kind == TokenKind::Keyword ||
         t.kind == TokenKind::StringLiteral;
}

// CREATE [TEMP|TEMPORARY] TABLE [IF NOT EXISTS] [schema.]name ( defs ) ...
void parse_create_table(const TokenStream& ts, SchemaCatalog& cat) {
  std::size_t i = 1;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::ParseError, "malformed CREATE TABLE: " + why);
  };
  if (i < ts.size() && (ts[i].is_keyword("TEMP") || ts[i].is_keyword("TEMPORARY"))) ++i;
  ++i;  // TABLE
  if (i + 2 < ts.size() && ts[i].is_keyword("IF") && ts[i + 1].is_keyword("NOT") &&
      ts[i + 2].is_keyword("EXISTS")) {
    i += 3;
  }
  if (i >= ts.size() || !is_name_token(ts[i])) fail("missing table name");
  std::string name = ts[i].text;
  ++i;
  if (i + 1 < ts.size() && ts[i].is_punct('.')) {
    if (!is_name_token(ts[i + 1])) fail("missing table name after schema qualifier");
    name = ts[i + 1].text;
    i += 2;
  }
  if (i < ts.size() && ts[i].is_keyword("AS")) {
    cat.add_table(std::move(name), {});
    return;
  }
  if (i >= ts.size() || !ts[i].is_punct('(')) fail("expected '(' after table '" + name + "'");
  ++i;

  std::vector<std::string> columns;
  int depth = 0;
  bool at_element_start = true;
  bool closed = false;
  for (; i < ts.size(); ++i) {
    const Token& t = ts[i];
    if (t.is_punct('(')) {
      ++depth;
    } else if (t.is_punct(')')) {
      if (depth == 0) {
        if (at_element_start) fail("empty column definition in '" + name + "'");
        closed = true;
        break;
      }
      --depth;
    } else if (t.is_punct(',') && depth == 0) {
      if (at_element_start) fail("empty column definition in '" + name + "'");
      at_element_start = true;
      continue;
    }
    if (at_element_start) {
      at_element_start = false;
      if (is_table_constraint(t)) continue;
      if (!is_name_token(t)) fail("bad column name '" + t.text + "' in '" + name + "'");
      columns.push_back(t.text);
    }
  }
  if (!closed) fail("unbalanced parentheses in '" + name + "'");
  cat.add_table(std::move(name), std::move(columns));
}

}  // namespace

SchemaCatalog load_catalog_ddl(std::string_view ddl_text, std::string db_id) {
  std::vector<TokenStream> statements;
  try {
    statements = lex_script(ddl_text);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  SchemaCatalog cat(std::move(db_id));
  for (const auto& ts : statements) {
    if (!ts[0].is_keyword("CREATE")) continue;
    std::size_t k = 1;
    if (k < ts.size() && (ts[k].is_keyword("TEMP") || ts[k].is_keyword("TEMPORARY"))) ++k;
    if (k < ts.size() && ts[k].is_keyword("TABLE")) parse_create_table(ts, cat);
  }
  if (cat.empty()) throw Error(ErrorCode::EmptyCatalog, "DDL defines no tables");
  return cat;
}

CatalogSet load_catalog_set(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  CatalogSet out;
  auto add = [&](SchemaCatalog cat) {
    std::string id = cat.db_id();
    if (!out.emplace(id, std::move(cat)).second) {
      throw Error(ErrorCode::ParseError, "db_id '" + id + "' appears in more than one catalog");
    }
  };
  auto add_json_file = [&](const fs::path& p) {
    auto doc = parse_checked(read_file(p));
    if (doc.is_array()) {
      for (const auto& item : doc) add(catalog_from_json(item));
    } else {
      add(catalog_from_json(doc));
    }
  };

  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
      if (p.extension() == ".json") {
        add_json_file(p);
      } else if (p.extension() == ".sql") {
        add(load_catalog_ddl(read_file(p), p.stem().string()));
      }
    }
  } else if (fs::exists(path)) {
    if (path.extension() == ".sql") {
      add(load_catalog_ddl(read_file(path), path.stem().string()));
    } else {
      add_json_file(path);
    }
  } else {
    throw Error(ErrorCode::IoError, "no such catalog path: " + path.string());
  }
  if (out.empty()) throw Error(ErrorCode::EmptyCatalog, "no catalogs found at " + path.string());
  return out;
}

std::vector<SchemaCatalog> convert_spider_tables(std::string_view tables_json,
                                                 std::vector<std::string>* skipped) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(tables_json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::ParseError, "tables.json must be an array");
  std::vector<SchemaCatalog> out;
  try {
    for (const auto& entry : doc) {
      const auto& names = entry.contains("table_names_original") ? entry.at("table_names_original")
                                                                 : entry.at("table_names");
      const auto& cols = entry.contains("column_names_original")
                             ? entry.at("column_names_original")
                             : entry.at("column_names");
      std::vector<std::vector<std::string>> per_table(names.size());
      for (const auto& c : cols) {
        const int idx = c.at(0).get<int>();
        if (idx < 0) continue;  // the [-1, "*"] entry
        per_table.at(static_cast<std::size_t>(idx)).push_back(c.at(1).get<std::string>());
      }
      SchemaCatalog cat(entry.at("db_id").get<std::string>());
      try {
        for (std::size_t t = 0; t < names.size(); ++t) {
          cat.add_table(names[t].get<std::string>(), std::move(per_table[t]));
        }
      } catch (const Error& e) {
        if (skipped == nullptr) throw;
        skipped->push_back(cat.db_id() + ": " + e.what());
        continue;
      }
      out.push_back(std::move(cat));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad Spider tables entry: ") + e.what());
  }
  return out;
}

}  // namespace sqltpl
