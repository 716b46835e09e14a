#include "sqltpl/powerlaw.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>

#include "parallel.hpp"
#include "sqltpl/error.hpp"

namespace sqltpl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlphaMin = 1.0 + 1e-6;
// Consecutive values closer than this walk the tail mass with powers
// instead of a fresh Hurwitz zeta evaluation.
constexpr std::uint64_t kDirectSumGap = 64;

void quiet_gsl() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

// zeta(s, q) = sum_{k>=0} (k + q)^-s, or +inf when GSL cannot represent it.
double hzeta(double s, double q) {
  gsl_sf_result r;
  if (gsl_sf_hzeta_e(s, q, &r) != GSL_SUCCESS) return kInf;
  return r.val;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

struct Tail {
  std::vector<std::uint64_t> values;  // distinct, ascending
  std::vector<std::size_t> counts;    // multiplicity of each value
  std::size_t n = 0;
  double sum_log = 0.0;
};

Tail tail_of(const std::vector<std::uint64_t>& sorted, std::uint64_t xmin) {
  Tail t;
  auto it = std::lower_bound(sorted.begin(), sorted.end(), xmin);
  for (; it != sorted.end(); ++it) {
    if (t.values.empty() || t.values.back() != *it) {
      t.values.push_back(*it);
      t.counts.push_back(0);
    }
    ++t.counts.back();
    ++t.n;
    t.sum_log += std::log(static_cast<double>(*it));
  }
  return t;
}

double mle(const Tail& t, std::uint64_t xmin, double alpha_max) {
  const double n = static_cast<double>(t.n);
  const double q = static_cast<double>(xmin);
  auto nll = [&](double a) { return n * std::log(hzeta(a, q)) + a * t.sum_log; };
  const int bits = 24;
  std::uintmax_t iters = 200;
  return boost::math::tools::brent_find_minima(nll, kAlphaMin, alpha_max, bits, iters).first;
}

// Sup distance over every integer >= xmin between the empirical CDF of the
// tail and the model CDF.
double ks(const Tail& t, std::uint64_t xmin, double alpha) {
  const double z0 = hzeta(alpha, static_cast<double>(xmin));
  if (!std::isfinite(z0) || z0 <= 0.0) return kInf;
  const double n = static_cast<double>(t.n);
  double mass = z0;                 // zeta(alpha, v) for the current v
  std::uint64_t at = xmin;          // v that `mass` refers to
  double emp_before = 0.0;          // empirical CDF just below v
  double d = 0.0;
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const std::uint64_t v = t.values[i];
    if (v - at < kDirectSumGap) {
      for (std::uint64_t u = at; u < v; ++u) mass -= std::pow(static_cast<double>(u), -alpha);
    } else {
      mass = hzeta(alpha, static_cast<double>(v));
    }
    at = v;
    const double model_before = 1.0 - mass / z0;  // P(X <= v - 1)
    const double model_at = model_before + std::pow(static_cast<double>(v), -alpha) / z0;
    const double emp_at = emp_before + static_cast<double>(t.counts[i]) / n;
    d = std::max({d, std::abs(emp_before - model_before), std::abs(emp_at - model_at)});
    emp_before = emp_at;
  }
  return d;
}

class Sampler {
 public:
  Sampler(double alpha, std::uint64_t xmin) : alpha_(alpha), xmin_(xmin) {
    const double z0 = hzeta(alpha, static_cast<double>(xmin));
    constexpr std::size_t kMaxTable = 100000;
    double acc = 0.0;
    for (std::size_t i = 0; i < kMaxTable; ++i) {
      acc += std::pow(static_cast<double>(xmin + i), -alpha) / z0;
      cdf_.push_back(std::min(acc, 1.0));
      if (1.0 - acc < 1e-12) break;
    }
  }

  std::uint64_t draw(std::mt19937_64& rng) const {
    const double u = uniform01(rng);
    if (u < cdf_.back()) {
      auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      return xmin_ + static_cast<std::uint64_t>(it - cdf_.begin());
    }
    // Past the table: continuous approximation of the conditional tail.
    const double rest = 1.0 - cdf_.back();
    const double v = rest > 0.0 ? std::min((u - cdf_.back()) / rest, 1.0 - 1e-16) : 0.0;
    const double start = static_cast<double>(xmin_ + cdf_.size()) - 0.5;
    const double x = std::floor(start * std::pow(1.0 - v, -1.0 / (alpha_ - 1.0)) + 0.5);
    constexpr double kCap = 4.0e18;
    return static_cast<std::uint64_t>(std::min(x, kCap));
  }

 private:
  double alpha_;
  std::uint64_t xmin_;
  std::vector<double> cdf_;
};

DiscretePowerLaw fit_sorted(const std::vector<std::uint64_t>& sorted,
                            const PowerLawFitOptions& options) {
  DiscretePowerLaw best;
  best.ks = kInf;
  best.n = sorted.size();
  if (sorted.empty() || sorted.front() == 0) {
    throw Error(ErrorCode::DegenerateSpectrum, "power-law fit needs positive observations");
  }
  std::vector<std::uint64_t> candidates(sorted.begin(), sorted.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  const auto min_tail = std::max<std::size_t>(
      options.min_tail, static_cast<std::size_t>(std::ceil(options.min_tail_fraction *
                                                           static_cast<double>(sorted.size()))));
  for (std::uint64_t xmin : candidates) {
    const Tail t = tail_of(sorted, xmin);
    if (t.n < min_tail || t.values.size() < 2) break;  // tails only shrink
    const double a = mle(t, xmin, options.alpha_max);
    const double d = ks(t, xmin, a);
    if (d < best.ks) {
      best.alpha = a;
      best.xmin = xmin;
      best.ks = d;
      best.n_tail = t.n;
    }
  }
  if (!std::isfinite(best.ks)) {
    throw Error(ErrorCode::DegenerateSpectrum,
                "no xmin leaves " + std::to_string(min_tail) +
                    " observations with at least two distinct values");
  }
  return best;
}

}  // namespace

double discrete_alpha_mle(const std::vector<std::uint64_t>& data, std::uint64_t xmin,
                          double alpha_max) {
  quiet_gsl();
  auto sorted = data;
  std::sort(sorted.begin(), sorted.end());
  const Tail t = tail_of(sorted, xmin);
  if (t.n == 0 || xmin == 0) throw Error(ErrorCode::DegenerateSpectrum, "empty tail");
  return mle(t, xmin, alpha_max);
}

double discrete_ks(const std::vector<std::uint64_t>& data, std::uint64_t xmin, double alpha) {
  quiet_gsl();
  auto sorted = data;
  std::sort(sorted.begin(), sorted.end());
  const Tail t = tail_of(sorted, xmin);
  if (t.n == 0 || xmin == 0) throw Error(ErrorCode::DegenerateSpectrum, "empty tail");
  return ks(t, xmin, alpha);
}

DiscretePowerLaw fit_discrete_power_law(const std::vector<std::uint64_t>& data,
                                        const PowerLawFitOptions& options) {
  quiet_gsl();
  auto sorted = data;
  std::sort(sorted.begin(), sorted.end());
  return fit_sorted(sorted, options);
}

std::vector<std::uint64_t> sample_discrete_power_law(double alpha, std::uint64_t xmin,
                                                     std::size_t n, std::uint64_t seed) {
  if (!(alpha > 1.0) || xmin == 0) {
    throw Error(ErrorCode::InvalidArgument, "need alpha > 1 and xmin >= 1");
  }
  quiet_gsl();
  Sampler sampler(alpha, xmin);
  auto rng = stream_rng(seed, 0);
  std::vector<std::uint64_t> out(n);
  for (auto& x : out) x = sampler.draw(rng);
  return out;
}

GofResult gof_bootstrap(const std::vector<std::uint64_t>& data, const GofOptions& options) {
  if (options.resamples < 100) {
    throw Error(ErrorCode::InvalidArgument,
                "bootstrap needs at least 100 resamples, got " + std::to_string(options.resamples));
  }
  quiet_gsl();
  auto sorted = data;
  std::sort(sorted.begin(), sorted.end());
  GofResult res;
  res.fit = fit_sorted(sorted, options.fit);

  const auto body_end = std::lower_bound(sorted.begin(), sorted.end(), res.fit.xmin);
  const std::vector<std::uint64_t> body(sorted.begin(), body_end);
  const double p_tail = static_cast<double>(res.fit.n_tail) / static_cast<double>(sorted.size());
  const Sampler sampler(res.fit.alpha, res.fit.xmin);

  // 1 = synthetic KS above the empirical one, 0 = not, -1 = synthetic set
  // could not be fitted.
  std::vector<int> outcome(options.resamples, 0);
  detail::parallel_for(options.resamples, options.threads, [&](std::size_t i) {
    auto rng = stream_rng(options.seed, i);
    std::vector<std::uint64_t> synth(sorted.size());
    for (auto& x : synth) {
      if (body.empty() || uniform01(rng) < p_tail) {
        x = sampler.draw(rng);
      } else {
        x = body[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(body.size()))];
      }
    }
    std::sort(synth.begin(), synth.end());
    try {
      outcome[i] = fit_sorted(synth, options.fit).ks > res.fit.ks ? 1 : 0;
    } catch (const Error&) {
      outcome[i] = -1;
    }
  });

  std::size_t valid = 0, above = 0;
  for (int o : outcome) {
    if (o >= 0) ++valid;
    if (o == 1) ++above;
  }
  res.resamples = valid;
  res.p_value = valid == 0 ? 0.0 : static_cast<double>(above) / static_cast<double>(valid);
  return res;
}

GofResult gof_bootstrap(const FrequencySpectrum& spec, const GofOptions& options) {
  return gof_bootstrap(spec.sorted_counts, options);
}

}  // namespace sqltpl
