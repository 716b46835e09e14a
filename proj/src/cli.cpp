#include "sqltpl/cli.hpp"

#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "sqltpl/corpus.hpp"
#include "sqltpl/error.hpp"
#include "sqltpl/io.hpp"
#include "sqltpl/report.hpp"
#include "sqltpl/stats.hpp"

namespace sqltpl {

using ordered_json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Args {
  std::string catalog;
  std::string records;
  std::string level;
  std::string out;
  std::string inventory;
  std::string db;
  std::string file;
  std::string sql;
  std::string tables;
  std::vector<std::string> datasets;
  std::size_t window = 15;
  std::vector<double> targets = kDefaultCoverageTargets;
  std::uint64_t seed = kDefaultSeed;
  bool dedup = false;
  std::size_t resamples = 1000;
  unsigned threads = 0;
  std::string fit_mode = "rank_frequency";
  std::string spearman_unit = "table_count_means";
  std::size_t min_tail = 10;
  double min_tail_fraction = 0.1;
};

std::string line(const ordered_json& j) {
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

std::string sql_input(const Args& a) {
  if (!a.file.empty()) return a.file == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                                            : read_file(a.file);
  if (a.sql.empty()) throw UsageError("give the query as an argument or with --file");
  if (a.sql == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  return a.sql;
}

const SchemaCatalog& pick_catalog(const CatalogSet& set, const std::string& db) {
  if (!db.empty()) {
    auto it = set.find(db);
    if (it == set.end()) throw Error(ErrorCode::MissingCatalog, "no catalog for db_id '" + db + "'");
    return it->second;
  }
  if (set.size() != 1) {
    throw UsageError("the catalog holds " + std::to_string(set.size()) +
                     " databases; choose one with --db");
  }
  return set.begin()->second;
}

IngestOptions ingest_options(const Args& a) {
  IngestOptions o;
  o.dedup = a.dedup;
  o.threads = a.threads;
  return o;
}

Level level_or(const Args& a, Level fallback) {
  return a.level.empty() ? fallback : parse_level(a.level);
}

// Inventory from --inventory, or built from --records and --catalog.
TemplateInventory obtain_inventory(const Args& a) {
  if (!a.inventory.empty()) {
    TemplateInventory inv = load_inventory(a.inventory);
    if (!a.level.empty() && parse_level(a.level) != inv.level()) {
      throw Error(ErrorCode::LevelMismatch, "inventory is " + std::string(to_string(inv.level())) +
                                                " but --level asks for " + a.level);
    }
    return inv;
  }
  if (a.records.empty() || a.catalog.empty()) {
    throw UsageError("give --inventory, or --records together with --catalog");
  }
  IngestResult r = ingest(a.records, a.catalog, ingest_options(a));
  return level_or(a, Level::Soft) == Level::Hard ? std::move(r.hard) : std::move(r.soft);
}

void add_source_opts(CLI::App* cmd, Args& a) {
  cmd->add_option("--inventory", a.inventory, "Saved inventory JSON")->envname("SQLTPL_INVENTORY");
  cmd->add_option("--records", a.records, "Records JSONL")->envname("SQLTPL_RECORDS");
  cmd->add_option("--catalog", a.catalog, "Catalog file or directory")->envname("SQLTPL_CATALOG");
  cmd->add_option("--level", a.level, "hard or soft (default soft)")->envname("SQLTPL_LEVEL");
  cmd->add_flag("--dedup", a.dedup, "Drop byte-identical repeated queries")->envname("SQLTPL_DEDUP");
}

void add_query_opts(CLI::App* cmd, Args& a) {
  cmd->add_option("sql", a.sql, "Query text, or - for stdin");
  cmd->add_option("--file", a.file, "Read the query from a file");
  cmd->add_option("--catalog", a.catalog, "Catalog file or directory")
      ->required()
      ->envname("SQLTPL_CATALOG");
  cmd->add_option("--db", a.db, "db_id to use when the catalog holds several")->envname("SQLTPL_DB");
}

void add_stats_opts(CLI::App* cmd, Args& a) {
  cmd->add_option("--seed", a.seed, "Bootstrap seed")->envname("SQLTPL_SEED");
  cmd->add_option("--resamples", a.resamples, "Bootstrap resamples (0 skips the test)")
      ->envname("SQLTPL_RESAMPLES");
  cmd->add_option("--threads", a.threads, "Worker threads (0 = all cores)")->envname("SQLTPL_THREADS");
  cmd->add_option("--fit-mode", a.fit_mode, "rank_frequency or frequency_of_frequency")
      ->envname("SQLTPL_FIT_MODE");
  cmd->add_option("--gof-min-tail", a.min_tail, "Smallest power-law tail, in observations");
  cmd->add_option("--gof-min-tail-fraction", a.min_tail_fraction,
                  "Smallest power-law tail, as a share of all observations");
}

GofOptions gof_options(const Args& a) {
  GofOptions g;
  g.resamples = a.resamples;
  g.seed = a.seed;
  g.threads = a.threads;
  g.fit.min_tail = a.min_tail;
  g.fit.min_tail_fraction = a.min_tail_fraction;
  return g;
}

int cmd_templatize(const Args& a, std::ostream& out, std::ostream& err) {
  const CatalogSet set = load_catalog_set(a.catalog);
  const TemplatePair pair = templatize(sql_input(a), pick_catalog(set, a.db));
  for (const auto& w : pair.hard.warnings) err << "warning: " << w << "\n";
  out << pair.hard.canonical << "\n" << pair.soft.canonical << "\n";
  return kExitOk;
}

int cmd_profile(const Args& a, std::ostream& out) {
  const CatalogSet set = load_catalog_set(a.catalog);
  const ComplexityProfile p = profile(sql_input(a), pick_catalog(set, a.db));
  ordered_json j;
  for (Proxy proxy : kAllProxies) j[std::string(to_string(proxy))] = p.get(proxy);
  out << line(j);
  return kExitOk;
}

int cmd_ingest(const Args& a, std::ostream& out) {
  const IngestResult r = ingest(a.records, a.catalog, ingest_options(a));
  std::filesystem::create_directories(a.out);
  const std::filesystem::path dir(a.out);
  save_inventory(r.hard, dir / "inventory_hard.json");
  save_inventory(r.soft, dir / "inventory_soft.json");
  write_file(dir / "failures.jsonl", failures_to_jsonl(r.failures));
  out << line({{"records_read", r.records_read},
               {"records_templatized", r.profiles.size()},
               {"failures", r.failures.size()},
               {"duplicates_dropped", r.duplicates_dropped},
               {"hard_templates", r.hard.size()},
               {"soft_templates", r.soft.size()}});
  return kExitOk;
}

int cmd_analyze(const Args& a, std::ostream& out) {
  AnalyzeOptions opts;
  opts.targets = a.targets;
  opts.window = a.window;
  opts.seed = a.seed;
  opts.resamples = a.resamples;
  opts.threads = a.threads;
  opts.fit_mode = parse_fit_mode(a.fit_mode);
  opts.spearman_unit = parse_spearman_unit(a.spearman_unit);
  opts.gof_fit.min_tail = a.min_tail;
  opts.gof_fit.min_tail_fraction = a.min_tail_fraction;
  if (opts.window == 0) throw UsageError("--window must be at least 1");
  const CatalogSet catalogs = load_catalog_set(a.catalog);
  const IngestResult r = ingest(a.records, catalogs, ingest_options(a));
  const auto files = write_analysis(r, catalogs, a.out, opts);
  out << line({{"out", a.out},
               {"files", files},
               {"records_read", r.records_read},
               {"failures", r.failures.size()}});
  return kExitOk;
}

int cmd_coverage(const Args& a, std::ostream& out) {
  const TemplateInventory inv = obtain_inventory(a);
  out << "level,target_pct,templates_needed,template_pct,queries_covered\n";
  for (const auto& row : coverage_table(inv, a.targets)) {
    char pct[32], target[32];
    std::snprintf(target, sizeof target, "%.12g", row.target);
    std::snprintf(pct, sizeof pct, "%.12g", row.template_pct);
    out << to_string(inv.level()) << ',' << target << ',' << row.templates_needed << ',' << pct
        << ',' << row.queries_covered << "\n";
  }
  return kExitOk;
}

int cmd_fit(const Args& a, std::ostream& out) {
  const TemplateInventory inv = obtain_inventory(a);
  const FrequencySpectrum spec = spectrum(inv);
  const PowerLawFit fit = fit_loglog(spec, parse_fit_mode(a.fit_mode));
  ordered_json j;
  j["level"] = to_string(inv.level());
  j["mode"] = to_string(fit.mode);
  j["alpha"] = fit.alpha;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  j["points"] = fit.points;
  if (a.resamples > 0) {
    const GofResult g = gof_bootstrap(spec, gof_options(a));
    j["gof"] = {{"p_value", g.p_value},     {"bootstrap_n", g.resamples}, {"seed", a.seed},
                {"alpha_mle", g.fit.alpha}, {"xmin", g.fit.xmin},         {"ks", g.fit.ks},
                {"n_tail", g.fit.n_tail}};
  }
  out << line(j);
  return kExitOk;
}

int cmd_match(const Args& a, std::ostream& out) {
  const CatalogSet set = load_catalog_set(a.catalog);
  const TemplateInventory inv = load_inventory(a.inventory);
  if (!a.level.empty() && parse_level(a.level) != inv.level()) {
    throw Error(ErrorCode::LevelMismatch, "inventory is " + std::string(to_string(inv.level())) +
                                              " but --level asks for " + a.level);
  }
  const MatchResult m = match(sql_input(a), pick_catalog(set, a.db), inv);
  ordered_json j;
  j["hit"] = m.hit;
  if (m.rank) j["rank"] = *m.rank;
  if (m.frequency) j["frequency"] = *m.frequency;
  j["level"] = to_string(m.level);
  j["template"] = m.canonical;
  out << line(j);
  return kExitOk;
}

int cmd_convert(const Args& a, std::ostream& out) {
  std::vector<std::string> skipped;
  const auto catalogs = convert_spider_tables(read_file(a.tables), &skipped);
  ordered_json cat_doc = ordered_json::array();
  for (const auto& c : catalogs) cat_doc.push_back(ordered_json::parse(catalog_to_json(c)));
  std::string records;
  std::size_t n = 0;
  for (const auto& path : a.datasets) {
    const std::string source = std::filesystem::path(path).stem().string();
    for (const auto& r : convert_spider_records(read_file(path), source)) {
      records += record_to_json(r);
      records += "\n";
      ++n;
    }
  }
  const std::filesystem::path dir(a.out);
  std::filesystem::create_directories(dir);
  write_file(dir / "catalogs.json", cat_doc.dump(1, ' ', false, ordered_json::error_handler_t::replace) + "\n");
  write_file(dir / "records.jsonl", records);
  out << line({{"databases", catalogs.size()}, {"records", n}, {"skipped_databases", skipped}});
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Args a;
  CLI::App app{"SQL template mining: templatize queries, profile complexity, analyze corpora",
               "sqltpl"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sqltpl 0.1.0");

  auto* templ = app.add_subcommand("templatize", "Print the hard and soft template of one query");
  add_query_opts(templ, a);
  auto* prof = app.add_subcommand("profile", "Print the six complexity proxies of one query");
  add_query_opts(prof, a);

  auto* ing = app.add_subcommand("ingest", "Build hard and soft template inventories");
  ing->add_option("--records", a.records, "Records JSONL")->required()->envname("SQLTPL_RECORDS");
  ing->add_option("--catalog", a.catalog, "Catalog file or directory")
      ->required()
      ->envname("SQLTPL_CATALOG");
  ing->add_option("--out", a.out, "Output directory")->required()->envname("SQLTPL_OUT");
  ing->add_flag("--dedup", a.dedup, "Drop byte-identical repeated queries")->envname("SQLTPL_DEDUP");
  ing->add_option("--threads", a.threads, "Worker threads (0 = all cores)")->envname("SQLTPL_THREADS");

  auto* ana = app.add_subcommand("analyze", "Write every statistics artifact for a corpus");
  ana->add_option("--records", a.records, "Records JSONL")->required()->envname("SQLTPL_RECORDS");
  ana->add_option("--catalog", a.catalog, "Catalog file or directory")
      ->required()
      ->envname("SQLTPL_CATALOG");
  ana->add_option("--out", a.out, "Output directory")->required()->envname("SQLTPL_OUT");
  ana->add_flag("--dedup", a.dedup, "Drop byte-identical repeated queries")->envname("SQLTPL_DEDUP");
  ana->add_option("--window", a.window, "Moving-average window")->envname("SQLTPL_WINDOW");
  ana->add_option("--targets", a.targets, "Coverage targets in percent")
      ->delimiter(',')
      ->envname("SQLTPL_TARGETS");
  ana->add_option("--spearman-unit", a.spearman_unit, "table_count_means or queries")
      ->envname("SQLTPL_SPEARMAN_UNIT");
  add_stats_opts(ana, a);

  auto* cov = app.add_subcommand("coverage", "Templates needed to cover target shares of queries");
  add_source_opts(cov, a);
  cov->add_option("--targets", a.targets, "Coverage targets in percent")
      ->delimiter(',')
      ->envname("SQLTPL_TARGETS");

  auto* fit = app.add_subcommand("fit", "Log-log power-law fit with bootstrap goodness of fit");
  add_source_opts(fit, a);
  add_stats_opts(fit, a);

  auto* mat = app.add_subcommand("match", "Look a query up in a saved inventory");
  add_query_opts(mat, a);
  mat->add_option("--inventory", a.inventory, "Saved inventory JSON")
      ->required()
      ->envname("SQLTPL_INVENTORY");
  mat->add_option("--level", a.level, "Expected inventory level")->envname("SQLTPL_LEVEL");

  auto* conv = app.add_subcommand("convert", "Convert a Spider-style dataset to records and catalogs");
  conv->add_option("--tables", a.tables, "tables.json")->required();
  conv->add_option("--dataset", a.datasets, "train/dev JSON (repeatable)")->required();
  conv->add_option("--out", a.out, "Output directory")->required()->envname("SQLTPL_OUT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*templ) return cmd_templatize(a, out, err);
    if (*prof) return cmd_profile(a, out);
    if (*ing) return cmd_ingest(a, out);
    if (*ana) return cmd_analyze(a, out);
    if (*cov) return cmd_coverage(a, out);
    if (*fit) return cmd_fit(a, out);
    if (*mat) return cmd_match(a, out);
    if (*conv) return cmd_convert(a, out);
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "sqltpl: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "sqltpl: " << e.what() << "\n";
    const bool usage = e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::UnknownProxy;
    return usage ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "sqltpl: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace sqltpl
