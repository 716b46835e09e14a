#include "sqltpl/report.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "sqltpl/error.hpp"
#include "sqltpl/io.hpp"

namespace sqltpl {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<Level, 2> kLevels = {Level::Hard, Level::Soft};

const char* const kSpectrumHeader = "level,rank,count,group,template";
const char* const kCoverageHeader = "level,target_pct,templates_needed,template_pct,queries_covered";
const char* const kLoglogHeader = "level,mode,x,y,log_x,log_y,fitted_log_y";
const char* const kSpearmanHeader = "proxy,unit,n,rho,p_value,status";
const char* const kMovingHeader = "table_count,n_records,y_raw,y_smooth";
const char* const kGroupHeader =
    "level,group,templates,template_pct,queries,query_pct,num_tables,num_joins,num_subqueries,"
    "max_nesting_depth,num_aggs_plus_group_by,advanced_feature_count";

std::string num(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ordered_json json_num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string dump(const ordered_json& doc) {
  return doc.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

class Writer {
 public:
  explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void put(const std::string& name, std::string_view contents) {
    write_file(dir_ / name, contents);
    written_.push_back(name);
  }

  void rollback() noexcept {
    std::error_code ec;
    for (const auto& name : written_) std::filesystem::remove(dir_ / name, ec);
    written_.clear();
  }

  [[nodiscard]] const std::vector<std::string>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

const TemplateInventory& inventory_at(const IngestResult& r, Level level) {
  return level == Level::Hard ? r.hard : r.soft;
}

std::vector<std::string> run(const IngestResult& ingested, const CatalogSet& catalogs,
                             const AnalyzeOptions& options, Writer& w) {
  if (ingested.soft.empty()) {
    throw Error(ErrorCode::EmptyInventory, "no record could be templatized");
  }
  const auto tcounts = table_counts(catalogs);

  std::ostringstream spectrum_csv, coverage_csv, loglog_csv, group_csv;
  spectrum_csv << kSpectrumHeader << "\n";
  coverage_csv << kCoverageHeader << "\n";
  loglog_csv << kLoglogHeader << "\n";
  group_csv << kGroupHeader << "\n";
  ordered_json fit_doc;
  fit_doc["format"] = "sqltpl-fit";
  fit_doc["version"] = kReportVersion;
  ordered_json level_summaries;

  for (Level level : kLevels) {
    const std::string lv(to_string(level));
    const TemplateInventory& inv = inventory_at(ingested, level);
    const FrequencySpectrum spec = spectrum(inv);

    std::size_t rank = 0;
    for (const auto& [canonical, e] : inv.ranked()) {
      spectrum_csv << lv << ',' << ++rank << ',' << e->count << ',' << to_string(group_of(e->count))
                   << ',' << csv_field(canonical) << "\n";
    }
    for (const auto& row : coverage_table(spec, options.targets)) {
      coverage_csv << lv << ',' << num(row.target) << ',' << row.templates_needed << ','
                   << num(row.template_pct) << ',' << row.queries_covered << "\n";
    }

    ordered_json fit_json;
    try {
      const PowerLawFit fit = fit_loglog(spec, options.fit_mode);
      for (const auto& p : loglog_points(spec, options.fit_mode)) {
        const double lx = std::log(p.x);
        loglog_csv << lv << ',' << to_string(options.fit_mode) << ',' << num(p.x) << ',' << num(p.y)
                   << ',' << num(lx) << ',' << num(std::log(p.y)) << ','
                   << num(fit.intercept - fit.alpha * lx) << "\n";
      }
      fit_json["mode"] = to_string(fit.mode);
      fit_json["alpha"] = json_num(fit.alpha);
      fit_json["intercept"] = json_num(fit.intercept);
      fit_json["r_squared"] = json_num(fit.r_squared);
      fit_json["points"] = fit.points;
    } catch (const Error& e) {
      fit_json["mode"] = to_string(options.fit_mode);
      fit_json["error"] = e.what();
    }
    ordered_json gof;
    gof["resamples_requested"] = options.resamples;
    gof["seed"] = options.seed;
    gof["min_tail"] = options.gof_fit.min_tail;
    gof["min_tail_fraction"] = options.gof_fit.min_tail_fraction;
    if (options.resamples == 0) {
      gof["skipped"] = true;
    } else {
      try {
        GofOptions go;
        go.resamples = options.resamples;
        go.seed = options.seed;
        go.threads = options.threads;
        go.fit = options.gof_fit;
        const GofResult g = gof_bootstrap(spec, go);
        gof["p_value"] = json_num(g.p_value);
        gof["bootstrap_n"] = g.resamples;
        gof["alpha_mle"] = json_num(g.fit.alpha);
        gof["xmin"] = g.fit.xmin;
        gof["ks"] = json_num(g.fit.ks);
        gof["n_tail"] = g.fit.n_tail;
      } catch (const Error& e) {
        gof["error"] = e.what();
      }
    }
    fit_json["gof"] = std::move(gof);
    fit_doc["levels"][lv] = std::move(fit_json);

    ordered_json groups = ordered_json::array();
    for (const auto& row : proxy_by_group(inv)) {
      const GroupShare& share = spec.group(row.group);
      group_csv << lv << ',' << to_string(row.group) << ',' << row.templates << ','
                << num(share.template_pct) << ',' << row.queries << ',' << num(share.query_pct);
      for (double m : row.means) group_csv << ',' << num(m);
      group_csv << "\n";
      groups.push_back({{"group", to_string(row.group)},
                        {"templates", share.templates},
                        {"template_pct", json_num(share.template_pct)},
                        {"queries", share.queries},
                        {"query_pct", json_num(share.query_pct)}});
    }
    level_summaries[lv] = {{"templates", inv.size()},
                           {"total_queries", inv.total_queries()},
                           {"groups", std::move(groups)}};
  }

  std::ostringstream spearman_csv;
  spearman_csv << kSpearmanHeader << "\n";
  std::vector<MovingAverageCurve> curves;
  for (Proxy proxy : kAllProxies) {
    spearman_csv << to_string(proxy) << ',' << to_string(options.spearman_unit) << ',';
    try {
      const auto r = proxy_spearman(ingested.profiles, tcounts, proxy, options.spearman_unit);
      spearman_csv << r.n << ',' << num(r.rho) << ',' << num(r.p_value) << ','
                   << (std::isnan(r.rho) ? "constant_series" : "ok") << "\n";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooFewPairs) throw;
      spearman_csv << "0,NA,NA,too_few_pairs\n";
    }
    curves.push_back(moving_average(ingested.profiles, tcounts, proxy, options.window));
  }

  std::vector<ComplexityProfile> profiles;
  profiles.reserve(ingested.profiles.size());
  for (const auto& r : ingested.profiles) profiles.push_back(r.profile);
  const auto summary = summary_stats(profiles);

  ordered_json summary_doc;
  summary_doc["format"] = "sqltpl-report";
  summary_doc["version"] = kReportVersion;
  ordered_json headers;
  headers["spectrum.csv"] = kSpectrumHeader;
  headers["coverage.csv"] = kCoverageHeader;
  headers["loglog.csv"] = kLoglogHeader;
  headers["spearman.csv"] = kSpearmanHeader;
  for (Proxy p : kAllProxies) headers["moving_avg_" + std::string(to_string(p)) + ".csv"] = kMovingHeader;
  headers["proxy_by_group.csv"] = kGroupHeader;
  summary_doc["csv_headers"] = std::move(headers);
  summary_doc["config"] = {{"window", options.window},
                           {"targets", options.targets},
                           {"seed", options.seed},
                           {"resamples", options.resamples},
                           {"fit_mode", to_string(options.fit_mode)},
                           {"spearman_unit", to_string(options.spearman_unit)},
                           {"gof_min_tail", options.gof_fit.min_tail},
                           {"gof_min_tail_fraction", options.gof_fit.min_tail_fraction}};
  summary_doc["corpus"] = {{"records_read", ingested.records_read},
                           {"records_templatized", ingested.profiles.size()},
                           {"failures", ingested.failures.size()},
                           {"duplicates_dropped", ingested.duplicates_dropped},
                           {"databases", catalogs.size()}};
  summary_doc["levels"] = std::move(level_summaries);
  ordered_json proxies = ordered_json::array();
  for (std::size_t k = 0; k < kProxyCount; ++k) {
    proxies.push_back({{"proxy", to_string(summary[k].proxy)},
                       {"median", json_num(summary[k].median)},
                       {"mean", json_num(summary[k].mean)},
                       {"min", summary[k].min},
                       {"max", summary[k].max},
                       {"peak_value", json_num(curves[k].peak_value)},
                       {"breaking_point", json_num(curves[k].breaking_point)}});
  }
  summary_doc["proxies"] = std::move(proxies);

  w.put("spectrum.csv", spectrum_csv.str());
  w.put("coverage.csv", coverage_csv.str());
  w.put("loglog.csv", loglog_csv.str());
  w.put("fit.json", dump(fit_doc));
  w.put("spearman.csv", spearman_csv.str());
  for (const auto& c : curves) {
    std::ostringstream csv;
    csv << kMovingHeader << "\n";
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      csv << num(c.x[i]) << ',' << c.n[i] << ',' << num(c.y_raw[i]) << ',' << num(c.y_smooth[i]) << "\n";
    }
    w.put("moving_avg_" + std::string(to_string(c.proxy)) + ".csv", csv.str());
  }
  w.put("proxy_by_group.csv", group_csv.str());
  w.put("inventory_hard.json", inventory_to_json(ingested.hard));
  w.put("inventory_soft.json", inventory_to_json(ingested.soft));
  w.put("failures.jsonl", failures_to_jsonl(ingested.failures));
  w.put("summary.json", dump(summary_doc));
  return w.written();
}

}  // namespace

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string failures_to_jsonl(const std::vector<IngestFailure>& failures) {
  std::string out;
  for (const auto& f : failures) {
    ordered_json obj;
    obj["line"] = f.line;
    obj["id"] = f.record_id;
    obj["db_id"] = f.db_id;
    obj["code"] = to_string(f.code);
    obj["reason"] = f.reason;
    out += obj.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
    out += "\n";
  }
  return out;
}

std::vector<std::string> write_analysis(const IngestResult& ingested, const CatalogSet& catalogs,
                                        const std::filesystem::path& out_dir,
                                        const AnalyzeOptions& options) {
  std::error_code ec;
  const bool existed = std::filesystem::exists(out_dir);
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  Writer w(out_dir);
  try {
    return run(ingested, catalogs, options, w);
  } catch (...) {
    w.rollback();
    if (!existed) std::filesystem::remove(out_dir, ec);
    throw;
  }
}

}  // namespace sqltpl
