#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sqltpl {

/// Where an identifier sits in a statement, as far as name resolution cares.
enum class Clause {
  None,
  With,
  Select,
  From,  // table slots of FROM / JOIN / INTO / UPDATE
  On,
  Where,
  GroupBy,
  Having,
  OrderBy,
  Limit,
  Window,
  Set,
  Values,
};

enum class NameClass { Table, Column, Unknown };

struct TableDef {
  std::string name;
  std::vector<std::string> columns;
  friend bool operator==(const TableDef&, const TableDef&) = default;
};

/// Table and column names of one database. Immutable once built; lookups
/// are case-insensitive.
class SchemaCatalog {
 public:
  SchemaCatalog() = default;
  explicit SchemaCatalog(std::string db_id) : db_id_(std::move(db_id)) {}

  /// Throws DuplicateTable when `name` collides case-insensitively.
  void add_table(std::string name, std::vector<std::string> columns);

  [[nodiscard]] const std::string& db_id() const noexcept { return db_id_; }
  [[nodiscard]] const std::vector<TableDef>& tables() const noexcept { return tables_; }
  [[nodiscard]] std::size_t table_count() const noexcept { return tables_.size(); }
  [[nodiscard]] bool empty() const noexcept { return tables_.empty(); }

  [[nodiscard]] bool has_table(std::string_view name) const;
  [[nodiscard]] bool has_column(std::string_view name) const;
  [[nodiscard]] const TableDef* find_table(std::string_view name) const;
  /// Every column name of every table, deduplicated case-insensitively, in
  /// first-seen order.
  [[nodiscard]] std::vector<std::string> all_columns() const;

  friend bool operator==(const SchemaCatalog& a, const SchemaCatalog& b) {
    return a.db_id_ == b.db_id_ && a.tables_ == b.tables_;
  }

 private:
  std::string db_id_;
  std::vector<TableDef> tables_;
  std::unordered_map<std::string, std::size_t> table_index_;    // upper name -> tables_ index
  std::unordered_map<std::string, std::size_t> column_refcount_;  // upper name -> #tables
};

/// Table-vs-column resolution. Tables win in FROM-clause table slots, columns
/// win everywhere else.
NameClass lookup(const SchemaCatalog& catalog, std::string_view name, Clause position);

/// Canonical JSON catalog: {"db_id": "...", "tables": {"t": ["c1", "c2"]}}.
/// Unknown keys are ignored. Throws ParseError, DuplicateTable, EmptyCatalog.
SchemaCatalog parse_catalog_json(std::string_view text);
SchemaCatalog load_catalog_json(const std::filesystem::path& path);
std::string catalog_to_json(const SchemaCatalog& catalog);

/// Extracts tables and columns from SQLite CREATE TABLE statements. Other
/// statements are skipped; constraints, types and indexes are ignored.
/// Throws ParseError on a malformed CREATE TABLE, EmptyCatalog when no table
/// is defined.
SchemaCatalog load_catalog_ddl(std::string_view ddl_text, std::string db_id = {});

using CatalogSet = std::map<std::string, SchemaCatalog>;

/// Loads every catalog under `path`: a JSON file holding one catalog object
/// or an array of them, a single *.sql DDL file, or a directory of such
/// *.json and *.sql files (DDL db_id taken from the file stem).
CatalogSet load_catalog_set(const std::filesystem::path& path);

/// Converts a Spider-style tables.json document (an array of objects with
/// db_id, table_names_original and column_names_original) to catalogs.
/// With `skipped`, databases that fail to convert are listed there instead
/// of aborting the whole conversion.
std::vector<SchemaCatalog> convert_spider_tables(std::string_view tables_json,
                                                 std::vector<std::string>* skipped = nullptr);

}  // namespace sqltpl
