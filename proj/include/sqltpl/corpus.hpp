#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqltpl/complexity.hpp"
#include "sqltpl/error.hpp"
#include "sqltpl/schema.hpp"
#include "sqltpl/templatizer.hpp"

namespace sqltpl {

struct QueryRecord {
  std::string id;  // "id" field, else db_id + ":" + FNV-1a of the SQL
  std::string db_id;
  std::string nlq;
  std::string sql;
  std::string source;
  std::optional<std::string> difficulty;  // easy | medium | difficult
};

/// Stable record id used when the input line carries none.
std::string default_record_id(std::string_view db_id, std::string_view sql);

struct InventoryEntry {
  std::uint64_t count = 0;
  std::array<std::uint64_t, kProxyCount> proxy_sums{};  // indexed like kAllProxies
  std::vector<std::string> examples;  // lexicographically smallest record ids

  friend bool operator==(const InventoryEntry&, const InventoryEntry&) = default;
};

class TemplateInventory {
 public:
  static constexpr std::size_t kMaxExamples = 3;

  explicit TemplateInventory(Level level = Level::Hard) : level_(level) {}

  [[nodiscard]] Level level() const noexcept { return level_; }
  [[nodiscard]] std::uint64_t total_queries() const noexcept { return total_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
  [[nodiscard]] const std::map<std::string, InventoryEntry>& entries() const noexcept {
    return entries_;
  }
  [[nodiscard]] const InventoryEntry* find(const std::string& canonical) const;

  void add(const std::string& canonical, const ComplexityProfile& profile,
           const std::string& record_id);
  /// Entry-wise sum. Throws LevelMismatch.
  void merge(const TemplateInventory& other);

  /// Entries by descending count, ties by canonical string.
  [[nodiscard]] std::vector<std::pair<std::string, const InventoryEntry*>> ranked() const;
  /// Dense rank (1 = most frequent) of a template, if present.
  [[nodiscard]] std::optional<std::uint64_t> rank_of(const std::string& canonical) const;

  /// A one-entry inventory, used when rebuilding from persisted form.
  static TemplateInventory single(Level level, const std::string& canonical, InventoryEntry entry);

  friend bool operator==(const TemplateInventory&, const TemplateInventory&) = default;

 private:
  Level level_;
  std::uint64_t total_ = 0;
  std::map<std::string, InventoryEntry> entries_;
};

struct IngestFailure {
  std::size_t line = 0;  // 1-based line in the records file, 0 when unknown
  std::string record_id;
  std::string db_id;
  ErrorCode code = ErrorCode::ParseError;
  std::string reason;
};

struct ProfiledRecord {
  std::string id;
  std::string db_id;
  std::string source;
  std::optional<std::string> difficulty;
  ComplexityProfile profile;
};

struct IngestOptions {
  bool dedup = false;     // drop byte-identical (db_id, sql) repeats
  unsigned threads = 0;   // 0 = hardware concurrency
};

struct IngestResult {
  TemplateInventory hard{Level::Hard};
  TemplateInventory soft{Level::Soft};
  std::vector<ProfiledRecord> profiles;  // input order
  std::vector<IngestFailure> failures;   // input order
  std::size_t records_read = 0;
  std::size_t duplicates_dropped = 0;
};

/// Parses JSONL. Malformed lines go to `failures`; throws FormatError when no
/// line parses and EmptyInput when there are no lines at all.
std::vector<QueryRecord> parse_records(std::string_view jsonl, std::vector<IngestFailure>& failures,
                                       std::vector<std::size_t>* line_numbers = nullptr);
std::string record_to_json(const QueryRecord& record);

IngestResult ingest_records(const std::vector<QueryRecord>& records, const CatalogSet& catalogs,
                            const IngestOptions& options = {});
IngestResult ingest(const std::filesystem::path& records_path, const CatalogSet& catalogs,
                    const IngestOptions& options = {});
IngestResult ingest(const std::filesystem::path& records_path,
                    const std::filesystem::path& catalogs_path, const IngestOptions& options = {});

struct MatchResult {
  bool hit = false;
  std::optional<std::uint64_t> rank;
  std::optional<std::uint64_t> frequency;
  Level level = Level::Hard;
  std::string canonical;
};

MatchResult match(std::string_view sql, const SchemaCatalog& catalog,
                  const TemplateInventory& inventory);

std::string inventory_to_json(const TemplateInventory& inventory);
/// Throws FormatError.
TemplateInventory inventory_from_json(std::string_view text);
void save_inventory(const TemplateInventory& inventory, const std::filesystem::path& path);
/// Throws IoError or FormatError.
TemplateInventory load_inventory(const std::filesystem::path& path);

/// Spider-style train/dev JSON array (keys db_id, question, query or SQL) to records.
std::vector<QueryRecord> convert_spider_records(std::string_view dataset_json,
                                                std::string_view source);

}  // namespace sqltpl
