#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqltpl/complexity.hpp"
#include "sqltpl/corpus.hpp"

namespace sqltpl {

// ---- frequency spectrum -------------------------------------------------------

enum class FrequencyGroup { High, Middle, LongTail, Once };

inline constexpr std::array<FrequencyGroup, 4> kAllGroups = {
    FrequencyGroup::High, FrequencyGroup::Middle, FrequencyGroup::LongTail, FrequencyGroup::Once};

/// "High", "Middle", "LongTail", "Once".
std::string_view to_string(FrequencyGroup group) noexcept;
/// High >= 100, Middle 10-99, LongTail 2-9, Once = 1.
FrequencyGroup group_of(std::uint64_t count) noexcept;

struct GroupShare {
  FrequencyGroup group = FrequencyGroup::Once;
  std::size_t templates = 0;
  std::uint64_t queries = 0;
  double template_pct = 0.0;  // of all templates
  double query_pct = 0.0;     // of all queries
};

struct FrequencySpectrum {
  std::vector<std::uint64_t> sorted_counts;  // descending
  std::array<GroupShare, 4> groups{};        // in kAllGroups order
  std::uint64_t total_queries = 0;

  [[nodiscard]] std::size_t template_count() const noexcept { return sorted_counts.size(); }
  [[nodiscard]] const GroupShare& group(FrequencyGroup g) const {
    return groups[static_cast<std::size_t>(g)];
  }
};

/// Throws EmptyInventory for no counts, InvalidArgument for a zero count.
FrequencySpectrum spectrum(std::vector<std::uint64_t> counts);
FrequencySpectrum spectrum(const TemplateInventory& inventory);

// ---- coverage -------------------------------------------------------------------

struct CoverageRow {
  double target = 0.0;              // percent of queries
  std::size_t templates_needed = 0;
  double template_pct = 0.0;        // templates_needed / template_count * 100
  std::uint64_t queries_covered = 0;
};

inline const std::vector<double> kDefaultCoverageTargets = {10, 30, 50, 70, 90, 100};

/// Smallest k whose top-k templates hold at least target% of the queries.
/// Throws EmptyInventory, InvalidArgument for targets outside (0, 100].
std::vector<CoverageRow> coverage_table(const FrequencySpectrum& spec,
                                        const std::vector<double>& targets);
std::vector<CoverageRow> coverage_table(const TemplateInventory& inventory,
                                        const std::vector<double>& targets);

// ---- log-log fit ------------------------------------------------------------------

enum class FitMode {
  RankFrequency,         // (rank, count) for every template
  FrequencyOfFrequency,  // (count value, number of templates with that count)
};

std::string_view to_string(FitMode mode) noexcept;
FitMode parse_fit_mode(std::string_view text);

struct LogLogPoint {
  double x = 0.0;
  double y = 0.0;
};

struct PowerLawFit {
  double alpha = 0.0;      // negated slope of ln y on ln x
  double intercept = 0.0;  // C in ln y = -alpha ln x + C
  double r_squared = 0.0;
  std::size_t points = 0;
  FitMode mode = FitMode::RankFrequency;
  std::optional<double> gof_p_value;
  std::size_t bootstrap_n = 0;
};

/// Raw (not logged) points for the chosen mode, ascending in x.
std::vector<LogLogPoint> loglog_points(const FrequencySpectrum& spec,
                                       FitMode mode = FitMode::RankFrequency);
/// Least squares on (ln x, ln y). Needs at least 3 points with positive
/// coordinates and two distinct x values; throws DegenerateSpectrum otherwise.
PowerLawFit fit_points(const std::vector<LogLogPoint>& points);
PowerLawFit fit_loglog(const FrequencySpectrum& spec, FitMode mode = FitMode::RankFrequency);

// ---- Spearman -----------------------------------------------------------------------

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided, Student t with n-2 degrees of freedom
  std::size_t n = 0;
};

/// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);
/// Throws TooFewPairs below 4 pairs, InvalidArgument on length mismatch.
/// A constant series has no defined correlation: rho and p are NaN.
SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y);

// ---- moving averages -----------------------------------------------------------------

struct MovingAverageCurve {
  Proxy proxy = Proxy::NumTables;
  std::size_t window = 15;
  std::vector<double> x;        // table counts, ascending
  std::vector<std::size_t> n;   // records per table count
  std::vector<double> y_raw;    // mean proxy per table count
  std::vector<double> y_smooth; // trailing mean of y_raw
  double peak_value = 0.0;
  double breaking_point = 0.0;  // first x where y_smooth peaks
};

/// Trailing window mean; the first window-1 points average what exists.
std::vector<double> trailing_mean(const std::vector<double>& values, std::size_t window);
/// Smooths an already aggregated series. Throws EmptyInput, InvalidArgument.
MovingAverageCurve smooth_curve(std::vector<double> x, std::vector<double> y_raw,
                                std::size_t window);
/// Groups records by their database's table count. Throws EmptyInput,
/// InvalidArgument (window 0) and MissingCatalog (db without a table count).
MovingAverageCurve moving_average(const std::vector<ProfiledRecord>& records,
                                  const std::map<std::string, std::uint32_t>& table_counts,
                                  Proxy proxy, std::size_t window = 15);

/// Table counts of every catalog in a set.
std::map<std::string, std::uint32_t> table_counts(const CatalogSet& catalogs);

enum class SpearmanUnit {
  TableCountMeans,  // one pair per table count: (count, mean proxy)
  Queries,          // one pair per record: (table count, proxy)
};

std::string_view to_string(SpearmanUnit unit) noexcept;
SpearmanUnit parse_spearman_unit(std::string_view text);

/// Spearman between database table count and a proxy.
SpearmanResult proxy_spearman(const std::vector<ProfiledRecord>& records,
                              const std::map<std::string, std::uint32_t>& table_counts,
                              Proxy proxy, SpearmanUnit unit = SpearmanUnit::TableCountMeans);

// ---- per-group and summary tables -------------------------------------------------------

struct GroupProxyRow {
  FrequencyGroup group = FrequencyGroup::Once;
  std::size_t templates = 0;
  std::uint64_t queries = 0;
  std::array<double, kProxyCount> means{};  // NaN when the group is empty
};

/// Mean proxy over the queries whose template falls in each group.
/// Throws EmptyInventory.
std::array<GroupProxyRow, 4> proxy_by_group(const TemplateInventory& inventory);

struct ProxySummary {
  Proxy proxy = Proxy::NumTables;
  double median = 0.0;  // lower middle for even n
  double mean = 0.0;
  std::uint32_t min = 0;
  std::uint32_t max = 0;
};

/// Throws EmptyInput.
std::array<ProxySummary, kProxyCount> summary_stats(const std::vector<ComplexityProfile>& profiles);

}  // namespace sqltpl
