#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "sqltpl/cli.hpp"
#include "sqltpl/complexity.hpp"
#include "sqltpl/corpus.hpp"
#include "sqltpl/error.hpp"
#include "sqltpl/lexer.hpp"
#include "sqltpl/powerlaw.hpp"
#include "sqltpl/report.hpp"
#include "sqltpl/schema.hpp"
#include "sqltpl/stats.hpp"
#include "sqltpl/templatizer.hpp"

namespace py = pybind11;
using namespace sqltpl;

namespace {

py::dict profile_dict(const ComplexityProfile& p) {
  py::dict d;
  for (Proxy proxy : kAllProxies) d[py::str(std::string(to_string(proxy)))] = p.get(proxy);
  return d;
}

py::dict template_dict(const Template& t) {
  py::dict d;
  d["level"] = std::string(to_string(t.level));
  d["template"] = t.canonical;
  d["warnings"] = t.warnings;
  return d;
}

py::dict spectrum_dict(const FrequencySpectrum& spec) {
  py::dict d;
  d["sorted_counts"] = spec.sorted_counts;
  d["total_queries"] = spec.total_queries;
  d["template_count"] = spec.template_count();
  py::dict groups;
  for (const auto& g : spec.groups) {
    py::dict row;
    row["templates"] = g.templates;
    row["queries"] = g.queries;
    row["template_pct"] = g.template_pct;
    row["query_pct"] = g.query_pct;
    groups[py::str(std::string(to_string(g.group)))] = row;
  }
  d["groups"] = groups;
  return d;
}

py::list coverage_list(const std::vector<CoverageRow>& rows) {
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["target"] = r.target;
    d["templates_needed"] = r.templates_needed;
    d["template_pct"] = r.template_pct;
    d["queries_covered"] = r.queries_covered;
    out.append(d);
  }
  return out;
}

py::dict fit_dict(const PowerLawFit& f) {
  py::dict d;
  d["alpha"] = f.alpha;
  d["intercept"] = f.intercept;
  d["r_squared"] = f.r_squared;
  d["points"] = f.points;
  d["mode"] = std::string(to_string(f.mode));
  return d;
}

std::vector<std::uint64_t> counts_of(const TemplateInventory& inv) {
  std::vector<std::uint64_t> counts;
  for (const auto& [_, e] : inv.entries()) counts.push_back(e.count);
  return counts;
}

}  // namespace

PYBIND11_MODULE(_sqltpl, m) {
  m.doc() = "SQL query templatization and template-distribution statistics";

  py::register_exception<Error>(m, "SqltplError", PyExc_RuntimeError);

  py::class_<SchemaCatalog>(m, "Catalog")
      .def_static("from_json", [](const std::string& text) { return parse_catalog_json(text); })
      .def_static("from_ddl", [](const std::string& ddl, std::string db_id) {
        return load_catalog_ddl(ddl, std::move(db_id));
      }, py::arg("ddl"), py::arg("db_id") = "")
      .def_static("load", &load_catalog_json)
      .def_property_readonly("db_id", &SchemaCatalog::db_id)
      .def_property_readonly("table_names", [](const SchemaCatalog& c) {
        std::vector<std::string> names;
        for (const auto& t : c.tables()) names.push_back(t.name);
        return names;
      })
      .def("has_table", &SchemaCatalog::has_table)
      .def("has_column", &SchemaCatalog::has_column)
      .def("to_json", &catalog_to_json);

  m.def("load_catalogs", &load_catalog_set, py::arg("path"),
        "Catalogs keyed by db_id from a JSON file, a DDL file or a directory.");

  m.def("lex", [](const std::string& sql) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& t : lex(sql)) out.emplace_back(std::string(to_string(t.kind)), t.text);
    return out;
  }, py::arg("sql"));

  m.def("templatize", [](const std::string& sql, const SchemaCatalog& catalog) {
    const TemplatePair pair = templatize(sql, catalog);
    py::dict d;
    d["hard"] = template_dict(pair.hard);
    d["soft"] = template_dict(pair.soft);
    return d;
  }, py::arg("sql"), py::arg("catalog"));

  m.def("profile", [](const std::string& sql, const SchemaCatalog& catalog) {
    return profile_dict(profile(sql, catalog));
  }, py::arg("sql"), py::arg("catalog"));

  py::class_<TemplateInventory>(m, "Inventory")
      .def_static("load", &load_inventory)
      .def_static("from_json", [](const std::string& text) { return inventory_from_json(text); })
      .def("save", [](const TemplateInventory& inv, const std::filesystem::path& p) {
        save_inventory(inv, p);
      })
      .def("to_json", &inventory_to_json)
      .def_property_readonly("level", [](const TemplateInventory& inv) {
        return std::string(to_string(inv.level()));
      })
      .def_property_readonly("total_queries", &TemplateInventory::total_queries)
      .def("__len__", &TemplateInventory::size)
      .def("__eq__", [](const TemplateInventory& a, const TemplateInventory& b) { return a == b; })
      .def("count", [](const TemplateInventory& inv, const std::string& tpl) -> std::uint64_t {
        const auto* e = inv.find(tpl);
        return e == nullptr ? 0 : e->count;
      })
      .def("ranked", [](const TemplateInventory& inv) {
        std::vector<std::pair<std::string, std::uint64_t>> out;
        for (const auto& [tpl, e] : inv.ranked()) out.emplace_back(tpl, e->count);
        return out;
      })
      .def("merge", [](TemplateInventory& inv, const TemplateInventory& other) { inv.merge(other); })
      .def("spectrum", [](const TemplateInventory& inv) { return spectrum_dict(spectrum(inv)); })
      .def("coverage", [](const TemplateInventory& inv, const std::vector<double>& targets) {
        return coverage_list(coverage_table(inv, targets));
      }, py::arg("targets") = kDefaultCoverageTargets)
      .def("fit", [](const TemplateInventory& inv, const std::string& mode) {
        return fit_dict(fit_loglog(spectrum(inv), parse_fit_mode(mode)));
      }, py::arg("mode") = "rank_frequency");

  py::class_<IngestResult>(m, "IngestResult")
      .def_readonly("hard", &IngestResult::hard)
      .def_readonly("soft", &IngestResult::soft)
      .def_readonly("records_read", &IngestResult::records_read)
      .def_readonly("duplicates_dropped", &IngestResult::duplicates_dropped)
      .def_property_readonly("failures", [](const IngestResult& r) {
        py::list out;
        for (const auto& f : r.failures) {
          py::dict d;
          d["line"] = f.line;
          d["id"] = f.record_id;
          d["db_id"] = f.db_id;
          d["code"] = std::string(to_string(f.code));
          d["reason"] = f.reason;
          out.append(d);
        }
        return out;
      })
      .def_property_readonly("profiles", [](const IngestResult& r) {
        py::list out;
        for (const auto& p : r.profiles) {
          py::dict d = profile_dict(p.profile);
          d["id"] = p.id;
          d["db_id"] = p.db_id;
          out.append(d);
        }
        return out;
      });

  m.def("ingest", [](const std::filesystem::path& records, const std::filesystem::path& catalogs,
                     bool dedup, unsigned threads) {
    py::gil_scoped_release release;
    return ingest(records, catalogs, IngestOptions{dedup, threads});
  }, py::arg("records"), py::arg("catalogs"), py::arg("dedup") = false, py::arg("threads") = 0);

  m.def("match", [](const std::string& sql, const SchemaCatalog& catalog,
                    const TemplateInventory& inventory) {
    const MatchResult r = match(sql, catalog, inventory);
    py::dict d;
    d["hit"] = r.hit;
    d["rank"] = r.rank;
    d["frequency"] = r.frequency;
    d["level"] = std::string(to_string(r.level));
    d["template"] = r.canonical;
    return d;
  }, py::arg("sql"), py::arg("catalog"), py::arg("inventory"));

  m.def("spectrum", [](std::vector<std::uint64_t> counts) {
    return spectrum_dict(spectrum(std::move(counts)));
  }, py::arg("counts"));

  m.def("coverage", [](std::vector<std::uint64_t> counts, const std::vector<double>& targets) {
    return coverage_list(coverage_table(spectrum(std::move(counts)), targets));
  }, py::arg("counts"), py::arg("targets") = kDefaultCoverageTargets);

  m.def("fit_loglog", [](std::vector<std::uint64_t> counts, const std::string& mode) {
    return fit_dict(fit_loglog(spectrum(std::move(counts)), parse_fit_mode(mode)));
  }, py::arg("counts"), py::arg("mode") = "rank_frequency");

  m.def("fit_points", [](const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "x and y differ in length");
    std::vector<LogLogPoint> pts;
    for (std::size_t i = 0; i < x.size(); ++i) pts.push_back({x[i], y[i]});
    return fit_dict(fit_points(pts));
  }, py::arg("x"), py::arg("y"));

  m.def("gof", [](const std::vector<std::uint64_t>& data, std::size_t resamples,
                  std::uint64_t seed, unsigned threads) {
    GofOptions opts;
    opts.resamples = resamples;
    opts.seed = seed;
    opts.threads = threads;
    GofResult r;
    {
      py::gil_scoped_release release;
      r = gof_bootstrap(data, opts);
    }
    py::dict d;
    d["p_value"] = r.p_value;
    d["alpha"] = r.fit.alpha;
    d["xmin"] = r.fit.xmin;
    d["ks"] = r.fit.ks;
    d["n_tail"] = r.fit.n_tail;
    d["resamples"] = r.resamples;
    return d;
  }, py::arg("data"), py::arg("resamples") = 1000, py::arg("seed") = kDefaultSeed,
     py::arg("threads") = 0);

  m.def("sample_power_law", &sample_discrete_power_law, py::arg("alpha"), py::arg("xmin"),
        py::arg("n"), py::arg("seed"));

  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) {
    const SpearmanResult r = spearman(x, y);
    return py::make_tuple(r.rho, r.p_value);
  }, py::arg("x"), py::arg("y"));

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "sqltpl");
    std::ostringstream out, err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the command line tool in-process; returns (exit_code, stdout, stderr).");
}
