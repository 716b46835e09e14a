#include "sqltpl/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <set>

#include "parallel.hpp"
#include "sqltpl/io.hpp"

namespace sqltpl {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kInventoryFormat = "sqltpl-inventory";
constexpr int kInventoryVersion = 1;

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void merge_examples(std::vector<std::string>& into, const std::vector<std::string>& from) {
  into.insert(into.end(), from.begin(), from.end());
  std::sort(into.begin(), into.end());
  into.erase(std::unique(into.begin(), into.end()), into.end());
  if (into.size() > TemplateInventory::kMaxExamples) into.resize(TemplateInventory::kMaxExamples);
}

std::optional<std::string> normalize_difficulty(std::string tag) {
  for (auto& c : tag) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (tag == "easy" || tag == "simple") return "easy";
  if (tag == "medium" || tag == "moderate") return "medium";
  if (tag == "difficult" || tag == "hard" || tag == "challenging") return "difficult";
  return std::nullopt;
}

std::string json_string_field(const json& obj, const char* key, bool required) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) throw Error(ErrorCode::FormatError, std::string("missing field '") + key + "'");
    return {};
  }
  if (!it->is_string()) {
    throw Error(ErrorCode::FormatError, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

QueryRecord record_from_json(const json& obj) {
  if (!obj.is_object()) throw Error(ErrorCode::FormatError, "record must be a JSON object");
  QueryRecord r;
  r.db_id = json_string_field(obj, "db_id", true);
  r.sql = json_string_field(obj, "sql", true);
  r.nlq = json_string_field(obj, "nlq", false);
  r.source = json_string_field(obj, "source", false);
  if (auto it = obj.find("difficulty"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::FormatError, "field 'difficulty' must be a string");
    r.difficulty = normalize_difficulty(it->get<std::string>());
    if (!r.difficulty) {
      throw Error(ErrorCode::FormatError,
                  "difficulty must be easy, medium or difficult, got '" + it->get<std::string>() + "'");
    }
  }
  if (auto it = obj.find("id"); it != obj.end() && !it->is_null()) {
    if (it->is_string()) {
      r.id = it->get<std::string>();
    } else if (it->is_number_integer()) {
      r.id = std::to_string(it->get<std::int64_t>());
    } else {
      throw Error(ErrorCode::FormatError, "field 'id' must be a string or integer");
    }
  } else {
    r.id = default_record_id(r.db_id, r.sql);
  }
  return r;
}

std::string dump(const ordered_json& doc, int indent) {
  return doc.dump(indent, ' ', false, ordered_json::error_handler_t::replace);
}

}  // namespace

std::string default_record_id(std::string_view db_id, std::string_view sql) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(sql)));
  return std::string(db_id) + ":" + hex;
}

// ---- inventory --------------------------------------------------------------

const InventoryEntry* TemplateInventory::find(const std::string& canonical) const {
  auto it = entries_.find(canonical);
  return it == entries_.end() ? nullptr : &it->second;
}

void TemplateInventory::add(const std::string& canonical, const ComplexityProfile& profile,
                            const std::string& record_id) {
  InventoryEntry& e = entries_[canonical];
  ++e.count;
  for (std::size_t i = 0; i < kProxyCount; ++i) e.proxy_sums[i] += profile.get(kAllProxies[i]);
  merge_examples(e.examples, {record_id});
  ++total_;
}

TemplateInventory TemplateInventory::single(Level level, const std::string& canonical,
                                            InventoryEntry entry) {
  TemplateInventory inv(level);
  inv.total_ = entry.count;
  inv.entries_.emplace(canonical, std::move(entry));
  return inv;
}

void TemplateInventory::merge(const TemplateInventory& other) {
  if (other.level_ != level_) {
    throw Error(ErrorCode::LevelMismatch, "cannot merge a " + std::string(to_string(other.level_)) +
                                              " inventory into a " + std::string(to_string(level_)) +
                                              " one");
  }
  for (const auto& [canonical, src] : other.entries_) {
    InventoryEntry& e = entries_[canonical];
    e.count += src.count;
    for (std::size_t i = 0; i < kProxyCount; ++i) e.proxy_sums[i] += src.proxy_sums[i];
    merge_examples(e.examples, src.examples);
  }
  total_ += other.total_;
}

std::vector<std::pair<std::string, const InventoryEntry*>> TemplateInventory::ranked() const {
  std::vector<std::pair<std::string, const InventoryEntry*>> out;
  out.reserve(entries_.size());
  for (const auto& [k, e] : entries_) out.emplace_back(k, &e);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second->count > b.second->count;
  });
  return out;
}

std::optional<std::uint64_t> TemplateInventory::rank_of(const std::string& canonical) const {
  const InventoryEntry* e = find(canonical);
  if (e == nullptr) return std::nullopt;
  std::set<std::uint64_t> higher;
  for (const auto& [k, other] : entries_) {
    if (other.count > e->count) higher.insert(other.count);
  }
  return higher.size() + 1;
}

std::string inventory_to_json(const TemplateInventory& inventory) {
  ordered_json doc;
  doc["format"] = kInventoryFormat;
  doc["version"] = kInventoryVersion;
  doc["level"] = to_string(inventory.level());
  doc["total_queries"] = inventory.total_queries();
  ordered_json entries = ordered_json::array();
  for (const auto& [canonical, e] : inventory.ranked()) {
    ordered_json sums;
    for (std::size_t i = 0; i < kProxyCount; ++i) sums[std::string(to_string(kAllProxies[i]))] = e->proxy_sums[i];
    entries.push_back({{"template", canonical},
                       {"count", e->count},
                       {"proxy_sums", std::move(sums)},
                       {"examples", e->examples}});
  }
  doc["entries"] = std::move(entries);
  return dump(doc, 2) + "\n";
}

TemplateInventory inventory_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("inventory is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kInventoryFormat) {
      throw Error(ErrorCode::FormatError, "not a sqltpl inventory");
    }
    if (doc.at("version").get<int>() != kInventoryVersion) {
      throw Error(ErrorCode::FormatError, "unsupported inventory version");
    }
    Level level;
    try {
      level = parse_level(doc.at("level").get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorCode::FormatError, e.what());
    }
    TemplateInventory inv(level);
    for (const auto& item : doc.at("entries")) {
      const auto canonical = item.at("template").get<std::string>();
      const auto count = item.at("count").get<std::uint64_t>();
      if (count == 0) throw Error(ErrorCode::FormatError, "entry count must be at least 1");
      if (inv.find(canonical) != nullptr) {
        throw Error(ErrorCode::FormatError, "duplicate template entry: " + canonical);
      }
      InventoryEntry e;
      e.count = count;
      const auto& sums = item.at("proxy_sums");
      for (std::size_t i = 0; i < kProxyCount; ++i) {
        e.proxy_sums[i] = sums.at(std::string(to_string(kAllProxies[i]))).get<std::uint64_t>();
      }
      e.examples = item.value("examples", std::vector<std::string>{});
      merge_examples(e.examples, {});
      inv.merge(TemplateInventory::single(level, canonical, std::move(e)));
    }
    if (inv.total_queries() != doc.at("total_queries").get<std::uint64_t>()) {
      throw Error(ErrorCode::FormatError, "total_queries does not equal the sum of entry counts");
    }
    return inv;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("malformed inventory: ") + e.what());
  }
}

void save_inventory(const TemplateInventory& inventory, const std::filesystem::path& path) {
  write_file(path, inventory_to_json(inventory));
}

TemplateInventory load_inventory(const std::filesystem::path& path) {
  return inventory_from_json(read_file(path));
}

// ---- records ----------------------------------------------------------------

std::vector<QueryRecord> parse_records(std::string_view jsonl, std::vector<IngestFailure>& failures,
                                       std::vector<std::size_t>* line_numbers) {
  std::vector<QueryRecord> out;
  std::size_t nonblank = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    std::size_t nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    std::string_view line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    ++nonblank;
    try {
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("invalid JSON: ") + e.what());
      }
      out.push_back(record_from_json(obj));
      if (line_numbers != nullptr) line_numbers->push_back(line_no);
    } catch (const Error& e) {
      failures.push_back({line_no, "", "", e.code(), e.what()});
    }
  }
  if (nonblank == 0) throw Error(ErrorCode::EmptyInput, "no records");
  if (out.empty()) {
    throw Error(ErrorCode::FormatError,
                "none of the " + std::to_string(nonblank) + " record lines could be parsed");
  }
  return out;
}

std::string record_to_json(const QueryRecord& r) {
  ordered_json obj;
  obj["id"] = r.id;
  obj["db_id"] = r.db_id;
  obj["nlq"] = r.nlq;
  obj["sql"] = r.sql;
  obj["source"] = r.source;
  if (r.difficulty) obj["difficulty"] = *r.difficulty;
  return dump(obj, -1);
}

std::vector<QueryRecord> convert_spider_records(std::string_view dataset_json,
                                                std::string_view source) {
  json doc;
  try {
    doc = json::parse(dataset_json);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("dataset is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::FormatError, "dataset must be a JSON array");
  std::vector<QueryRecord> out;
  out.reserve(doc.size());
  const int width = std::max<int>(5, static_cast<int>(std::to_string(doc.size()).size()));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    try {
      QueryRecord r;
      r.db_id = item.at("db_id").get<std::string>();
      r.sql = item.contains("query") ? item.at("query").get<std::string>()
                                     : item.at("SQL").get<std::string>();
      r.nlq = item.value("question", std::string{});
      r.source = std::string(source);
      if (auto it = item.find("difficulty"); it != item.end() && it->is_string()) {
        r.difficulty = normalize_difficulty(it->get<std::string>());
      }
      std::string idx = std::to_string(i);
      r.id = std::string(source) + "-" + std::string(width - static_cast<int>(idx.size()), '0') + idx;
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::FormatError,
                  "dataset item " + std::to_string(i) + " is malformed: " + e.what());
    }
  }
  return out;
}

// ---- pipeline ---------------------------------------------------------------

namespace {

struct Outcome {
  bool ok = false;
  std::string hard;
  std::string soft;
  ComplexityProfile profile;
  IngestFailure failure;
};

Outcome process(const QueryRecord& r, std::size_t line, const CatalogSet& catalogs) {
  Outcome o;
  o.failure.line = line;
  o.failure.record_id = r.id;
  o.failure.db_id = r.db_id;
  auto cat = catalogs.find(r.db_id);
  if (cat == catalogs.end()) {
    o.failure.code = ErrorCode::MissingCatalog;
    o.failure.reason = "no catalog for db_id '" + r.db_id + "'";
    return o;
  }
  try {
    const TokenStream ts = lex(r.sql);
    Template hard = hard_template(ts, cat->second);
    o.soft = soft_template(hard).canonical;
    o.hard = std::move(hard.canonical);
    o.profile = profile(ts, cat->second);
    o.ok = true;
  } catch (const Error& e) {
    o.failure.code = e.code();
    o.failure.reason = e.what();
  } catch (const std::exception& e) {
    o.failure.code = ErrorCode::ParseError;
    o.failure.reason = e.what();
  }
  return o;
}

IngestResult run_pipeline(const std::vector<QueryRecord>& records,
                          const std::vector<std::size_t>& lines, const CatalogSet& catalogs,
                          const IngestOptions& options) {
  IngestResult result;
  result.records_read = records.size();

  std::vector<std::size_t> keep;
  keep.reserve(records.size());
  if (options.dedup) {
    // Keep the smallest record id among byte-identical (db_id, sql) pairs so
    // the outcome does not depend on input order.
    std::map<std::pair<std::string_view, std::string_view>, std::size_t> first;
    for (std::size_t i = 0; i < records.size(); ++i) {
      auto [it, inserted] = first.try_emplace({records[i].db_id, records[i].sql}, i);
      if (!inserted && records[i].id < records[it->second].id) it->second = i;
    }
    std::vector<bool> kept(records.size(), false);
    for (const auto& [key, idx] : first) kept[idx] = true;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (kept[i]) keep.push_back(i);
    }
    result.duplicates_dropped = records.size() - keep.size();
  } else {
    for (std::size_t i = 0; i < records.size(); ++i) keep.push_back(i);
  }

  std::vector<Outcome> outcomes(keep.size());
  detail::parallel_for(keep.size(), options.threads, [&](std::size_t k) {
    const std::size_t i = keep[k];
    outcomes[k] = process(records[i], lines.empty() ? 0 : lines[i], catalogs);
  });

  for (std::size_t k = 0; k < keep.size(); ++k) {
    const QueryRecord& r = records[keep[k]];
    Outcome& o = outcomes[k];
    if (!o.ok) {
      result.failures.push_back(std::move(o.failure));
      continue;
    }
    result.hard.add(o.hard, o.profile, r.id);
    result.soft.add(o.soft, o.profile, r.id);
    result.profiles.push_back({r.id, r.db_id, r.source, r.difficulty, o.profile});
  }
  return result;
}

}  // namespace

IngestResult ingest_records(const std::vector<QueryRecord>& records, const CatalogSet& catalogs,
                            const IngestOptions& options) {
  return run_pipeline(records, {}, catalogs, options);
}

IngestResult ingest(const std::filesystem::path& records_path,
                    const std::filesystem::path& catalogs_path, const IngestOptions& options) {
  return ingest(records_path, load_catalog_set(catalogs_path), options);
}

IngestResult ingest(const std::filesystem::path& records_path, const CatalogSet& catalogs,
                    const IngestOptions& options) {
  std::vector<IngestFailure> format_failures;
  std::vector<std::size_t> lines;
  auto records = parse_records(read_file(records_path), format_failures, &lines);
  IngestResult result = run_pipeline(records, lines, catalogs, options);
  result.records_read += format_failures.size();
  // Merge both failure lists by line number.
  format_failures.insert(format_failures.end(), result.failures.begin(), result.failures.end());
  std::stable_sort(format_failures.begin(), format_failures.end(),
                   [](const IngestFailure& a, const IngestFailure& b) { return a.line < b.line; });
  result.failures = std::move(format_failures);
  return result;
}

MatchResult match(std::string_view sql, const SchemaCatalog& catalog,
                  const TemplateInventory& inventory) {
  MatchResult m;
  m.level = inventory.level();
  TemplatePair pair = templatize(sql, catalog);
  m.canonical = m.level == Level::Hard ? pair.hard.canonical : pair.soft.canonical;
  if (const InventoryEntry* e = inventory.find(m.canonical)) {
    m.hit = true;
    m.frequency = e->count;
    m.rank = inventory.rank_of(m.canonical);
  }
  return m;
}

}  // namespace sqltpl
