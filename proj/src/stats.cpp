#include "sqltpl/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "sqltpl/error.hpp"

namespace sqltpl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(FrequencyGroup group) noexcept {
  switch (group) {
    case FrequencyGroup::High: return "High";
    case FrequencyGroup::Middle: return "Middle";
    case FrequencyGroup::LongTail: return "LongTail";
    case FrequencyGroup::Once: return "Once";
  }
  return "?";
}

FrequencyGroup group_of(std::uint64_t count) noexcept {
  if (count >= 100) return FrequencyGroup::High;
  if (count >= 10) return FrequencyGroup::Middle;
  if (count >= 2) return FrequencyGroup::LongTail;
  return FrequencyGroup::Once;
}

FrequencySpectrum spectrum(std::vector<std::uint64_t> counts) {
  if (counts.empty()) throw Error(ErrorCode::EmptyInventory, "no templates");
  FrequencySpectrum s;
  std::sort(counts.begin(), counts.end(), std::greater<>());
  if (counts.back() == 0) throw Error(ErrorCode::InvalidArgument, "template counts must be >= 1");
  for (std::size_t g = 0; g < kAllGroups.size(); ++g) s.groups[g].group = kAllGroups[g];
  for (std::uint64_t c : counts) {
    auto& g = s.groups[static_cast<std::size_t>(group_of(c))];
    ++g.templates;
    g.queries += c;
    s.total_queries += c;
  }
  for (auto& g : s.groups) {
    g.template_pct = 100.0 * static_cast<double>(g.templates) / static_cast<double>(counts.size());
    g.query_pct = 100.0 * static_cast<double>(g.queries) / static_cast<double>(s.total_queries);
  }
  s.sorted_counts = std::move(counts);
  return s;
}

FrequencySpectrum spectrum(const TemplateInventory& inventory) {
  std::vector<std::uint64_t> counts;
  counts.reserve(inventory.size());
  for (const auto& [k, e] : inventory.entries()) counts.push_back(e.count);
  return spectrum(std::move(counts));
}

// ---- coverage -------------------------------------------------------------------

std::vector<CoverageRow> coverage_table(const FrequencySpectrum& spec,
                                        const std::vector<double>& targets) {
  if (spec.sorted_counts.empty()) throw Error(ErrorCode::EmptyInventory, "no templates");
  std::vector<std::uint64_t> cum(spec.sorted_counts.size());
  std::partial_sum(spec.sorted_counts.begin(), spec.sorted_counts.end(), cum.begin());
  const auto total = static_cast<long double>(spec.total_queries);
  std::vector<CoverageRow> rows;
  rows.reserve(targets.size());
  for (double target : targets) {
    if (!(target > 0.0 && target <= 100.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "coverage target must be in (0, 100], got " + std::to_string(target));
    }
    const long double need = static_cast<long double>(target) * total;
    auto it = std::partition_point(cum.begin(), cum.end(), [&](std::uint64_t c) {
      return static_cast<long double>(c) * 100.0L < need;
    });
    CoverageRow row;
    row.target = target;
    row.templates_needed = static_cast<std::size_t>(it - cum.begin()) + 1;
    row.template_pct =
        100.0 * static_cast<double>(row.templates_needed) / static_cast<double>(cum.size());
    row.queries_covered = cum[row.templates_needed - 1];
    rows.push_back(row);
  }
  return rows;
}

std::vector<CoverageRow> coverage_table(const TemplateInventory& inventory,
                                        const std::vector<double>& targets) {
  return coverage_table(spectrum(inventory), targets);
}

// ---- log-log fit ------------------------------------------------------------------

std::string_view to_string(FitMode mode) noexcept {
  return mode == FitMode::RankFrequency ? "rank_frequency" : "frequency_of_frequency";
}

FitMode parse_fit_mode(std::string_view text) {
  const auto t = lower(text);
  if (t == "rank_frequency" || t == "rank") return FitMode::RankFrequency;
  if (t == "frequency_of_frequency" || t == "fof") return FitMode::FrequencyOfFrequency;
  throw Error(ErrorCode::InvalidArgument, "unknown fit mode '" + std::string(text) + "'");
}

std::vector<LogLogPoint> loglog_points(const FrequencySpectrum& spec, FitMode mode) {
  std::vector<LogLogPoint> pts;
  if (mode == FitMode::RankFrequency) {
    pts.reserve(spec.sorted_counts.size());
    for (std::size_t r = 0; r < spec.sorted_counts.size(); ++r) {
      pts.push_back({static_cast<double>(r + 1), static_cast<double>(spec.sorted_counts[r])});
    }
  } else {
    // sorted_counts is descending; walk it backwards for ascending values.
    for (auto it = spec.sorted_counts.rbegin(); it != spec.sorted_counts.rend(); ++it) {
      const auto v = static_cast<double>(*it);
      if (!pts.empty() && pts.back().x == v) {
        pts.back().y += 1.0;
      } else {
        pts.push_back({v, 1.0});
      }
    }
  }
  return pts;
}

PowerLawFit fit_points(const std::vector<LogLogPoint>& points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::DegenerateSpectrum,
                "log-log fit needs at least 3 points, got " + std::to_string(points.size()));
  }
  const auto n = static_cast<double>(points.size());
  std::vector<double> lx(points.size()), ly(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].x > 0.0 && points[i].y > 0.0)) {
      throw Error(ErrorCode::DegenerateSpectrum, "log-log fit needs positive coordinates");
    }
    lx[i] = std::log(points[i].x);
    ly[i] = std::log(points[i].y);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw Error(ErrorCode::DegenerateSpectrum, "log-log fit needs distinct x values");
  PowerLawFit fit;
  const double slope = sxy / sxx;
  fit.alpha = -slope;
  fit.intercept = my - slope * mx;
  fit.points = points.size();
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + slope * lx[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

PowerLawFit fit_loglog(const FrequencySpectrum& spec, FitMode mode) {
  PowerLawFit fit = fit_points(loglog_points(spec, mode));
  fit.mode = mode;
  return fit;
}

// ---- Spearman -----------------------------------------------------------------------

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::InvalidArgument, "spearman needs series of equal length");
  }
  if (x.size() < 4) {
    throw Error(ErrorCode::TooFewPairs,
                "spearman needs at least 4 pairs, got " + std::to_string(x.size()));
  }
  SpearmanResult res;
  res.n = x.size();
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(res.n);

  const bool ties = [&] {
    auto has = [](std::vector<double> r) {
      std::sort(r.begin(), r.end());
      return std::adjacent_find(r.begin(), r.end()) != r.end();
    };
    return has(rx) || has(ry);
  }();
  if (!ties) {
    // Integer ranks: the classic formula is exact, so monotone series give +-1.
    double d2 = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
    res.rho = 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
  } else {
    const double mean = (n + 1.0) / 2.0;  // average ranks always sum to n(n+1)/2
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
      sxy += (rx[i] - mean) * (ry[i] - mean);
      sxx += (rx[i] - mean) * (rx[i] - mean);
      syy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (sxx == 0.0 || syy == 0.0) {
      res.rho = kNaN;
      res.p_value = kNaN;
      return res;
    }
    res.rho = sxy / std::sqrt(sxx * syy);
  }
  if (std::abs(res.rho) >= 1.0) {
    res.p_value = 0.0;
    return res;
  }
  const double dof = n - 2.0;
  const double t = res.rho * std::sqrt(dof / (1.0 - res.rho * res.rho));
  boost::math::students_t dist(dof);
  res.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return res;
}

// ---- moving averages -----------------------------------------------------------------

std::vector<double> trailing_mean(const std::vector<double>& values, std::size_t window) {
  if (window == 0) throw Error(ErrorCode::InvalidArgument, "window must be at least 1");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = lo; k <= i; ++k) sum += values[k];
    out[i] = sum / static_cast<double>(i - lo + 1);
  }
  return out;
}

MovingAverageCurve smooth_curve(std::vector<double> x, std::vector<double> y_raw,
                                std::size_t window) {
  if (x.empty()) throw Error(ErrorCode::EmptyInput, "no points to smooth");
  if (x.size() != y_raw.size()) {
    throw Error(ErrorCode::InvalidArgument, "x and y must have the same length");
  }
  MovingAverageCurve c;
  c.window = window;
  c.y_smooth = trailing_mean(y_raw, window);
  c.x = std::move(x);
  c.y_raw = std::move(y_raw);
  const auto peak = std::max_element(c.y_smooth.begin(), c.y_smooth.end());
  c.peak_value = *peak;
  c.breaking_point = c.x[static_cast<std::size_t>(peak - c.y_smooth.begin())];
  return c;
}

namespace {

struct TableCountGroups {
  std::vector<double> x;
  std::vector<std::size_t> n;
  std::vector<double> mean;
};

TableCountGroups group_by_table_count(const std::vector<ProfiledRecord>& records,
                                      const std::map<std::string, std::uint32_t>& table_counts,
                                      Proxy proxy) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no profiled records");
  std::map<std::uint32_t, std::pair<std::uint64_t, std::size_t>> acc;
  for (const auto& r : records) {
    auto it = table_counts.find(r.db_id);
    if (it == table_counts.end()) {
      throw Error(ErrorCode::MissingCatalog, "no table count for db_id '" + r.db_id + "'");
    }
    auto& slot = acc[it->second];
    slot.first += r.profile.get(proxy);
    ++slot.second;
  }
  TableCountGroups g;
  for (const auto& [tc, sum_n] : acc) {
    g.x.push_back(tc);
    g.n.push_back(sum_n.second);
    g.mean.push_back(static_cast<double>(sum_n.first) / static_cast<double>(sum_n.second));
  }
  return g;
}

}  // namespace

MovingAverageCurve moving_average(const std::vector<ProfiledRecord>& records,
                                  const std::map<std::string, std::uint32_t>& table_counts,
                                  Proxy proxy, std::size_t window) {
  if (window == 0) throw Error(ErrorCode::InvalidArgument, "window must be at least 1");
  auto g = group_by_table_count(records, table_counts, proxy);
  MovingAverageCurve c = smooth_curve(std::move(g.x), std::move(g.mean), window);
  c.proxy = proxy;
  c.n = std::move(g.n);
  return c;
}

std::map<std::string, std::uint32_t> table_counts(const CatalogSet& catalogs) {
  std::map<std::string, std::uint32_t> out;
  for (const auto& [db, cat] : catalogs) out[db] = static_cast<std::uint32_t>(cat.table_count());
  return out;
}

std::string_view to_string(SpearmanUnit unit) noexcept {
  return unit == SpearmanUnit::TableCountMeans ? "table_count_means" : "queries";
}

SpearmanUnit parse_spearman_unit(std::string_view text) {
  const auto t = lower(text);
  if (t == "table_count_means" || t == "means") return SpearmanUnit::TableCountMeans;
  if (t == "queries" || t == "query") return SpearmanUnit::Queries;
  throw Error(ErrorCode::InvalidArgument, "unknown Spearman unit '" + std::string(text) + "'");
}

SpearmanResult proxy_spearman(const std::vector<ProfiledRecord>& records,
                              const std::map<std::string, std::uint32_t>& table_counts,
                              Proxy proxy, SpearmanUnit unit) {
  if (unit == SpearmanUnit::TableCountMeans) {
    auto g = group_by_table_count(records, table_counts, proxy);
    return spearman(g.x, g.mean);
  }
  std::vector<double> x, y;
  x.reserve(records.size());
  y.reserve(records.size());
  for (const auto& r : records) {
    auto it = table_counts.find(r.db_id);
    if (it == table_counts.end()) {
      throw Error(ErrorCode::MissingCatalog, "no table count for db_id '" + r.db_id + "'");
    }
    x.push_back(it->second);
    y.push_back(r.profile.get(proxy));
  }
  return spearman(x, y);
}

// ---- per-group and summary tables -------------------------------------------------------

std::array<GroupProxyRow, 4> proxy_by_group(const TemplateInventory& inventory) {
  if (inventory.empty()) throw Error(ErrorCode::EmptyInventory, "no templates");
  std::array<GroupProxyRow, 4> rows{};
  std::array<std::array<std::uint64_t, kProxyCount>, 4> sums{};
  for (std::size_t g = 0; g < rows.size(); ++g) rows[g].group = kAllGroups[g];
  for (const auto& [k, e] : inventory.entries()) {
    const auto g = static_cast<std::size_t>(group_of(e.count));
    ++rows[g].templates;
    rows[g].queries += e.count;
    for (std::size_t p = 0; p < kProxyCount; ++p) sums[g][p] += e.proxy_sums[p];
  }
  for (std::size_t g = 0; g < rows.size(); ++g) {
    for (std::size_t p = 0; p < kProxyCount; ++p) {
      rows[g].means[p] = rows[g].queries == 0 ? kNaN
                                              : static_cast<double>(sums[g][p]) /
                                                    static_cast<double>(rows[g].queries);
    }
  }
  return rows;
}

std::array<ProxySummary, kProxyCount> summary_stats(const std::vector<ComplexityProfile>& profiles) {
  if (profiles.empty()) throw Error(ErrorCode::EmptyInput, "no profiles");
  std::array<ProxySummary, kProxyCount> out{};
  std::vector<std::uint32_t> v(profiles.size());
  for (std::size_t p = 0; p < kProxyCount; ++p) {
    const Proxy proxy = kAllProxies[p];
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      v[i] = profiles[i].get(proxy);
      sum += v[i];
    }
    const std::size_t mid = (v.size() - 1) / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    ProxySummary& s = out[p];
    s.proxy = proxy;
    s.median = v[mid];
    s.mean = static_cast<double>(sum) / static_cast<double>(v.size());
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
  }
  return out;
}

}  // namespace sqltpl
