#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sqltpl/corpus.hpp"
#include "sqltpl/powerlaw.hpp"
#include "sqltpl/stats.hpp"

namespace sqltpl {

inline constexpr int kReportVersion = 1;

struct AnalyzeOptions {
  std::vector<double> targets = kDefaultCoverageTargets;
  std::size_t window = 15;
  std::uint64_t seed = kDefaultSeed;
  std::size_t resamples = 1000;  // 0 skips the bootstrap
  unsigned threads = 0;
  FitMode fit_mode = FitMode::RankFrequency;
  SpearmanUnit spearman_unit = SpearmanUnit::TableCountMeans;
  PowerLawFitOptions gof_fit;
};

/// Writes every analysis artifact for an ingested corpus into `out_dir`
/// (created if missing) and returns the file names written. On failure,
/// files written so far are removed before the error propagates.
std::vector<std::string> write_analysis(const IngestResult& ingested, const CatalogSet& catalogs,
                                        const std::filesystem::path& out_dir,
                                        const AnalyzeOptions& options = {});

/// One JSON object per line: line, id, db_id, code, reason.
std::string failures_to_jsonl(const std::vector<IngestFailure>& failures);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

}  // namespace sqltpl
