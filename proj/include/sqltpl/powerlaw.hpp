#pragma once

#include <cstdint>
#include <vector>

#include "sqltpl/stats.hpp"

namespace sqltpl {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// Discrete power law p(x) = x^-alpha / zeta(alpha, xmin) for x >= xmin.
struct DiscretePowerLaw {
  double alpha = 0.0;
  std::uint64_t xmin = 1;
  double ks = 0.0;           // KS distance between tail data and the model
  std::size_t n_tail = 0;    // observations >= xmin
  std::size_t n = 0;         // all observations
};

struct PowerLawFitOptions {
  std::size_t min_tail = 10;   // xmin candidates must leave this many points
  double min_tail_fraction = 0.1;  // ... and at least this share of all points
  double alpha_max = 20.0;     // upper bound of the MLE search
};

/// MLE alpha for a fixed xmin.
double discrete_alpha_mle(const std::vector<std::uint64_t>& data, std::uint64_t xmin,
                          double alpha_max = 20.0);
/// KS distance of data (restricted to x >= xmin) against the model.
double discrete_ks(const std::vector<std::uint64_t>& data, std::uint64_t xmin, double alpha);
/// Joint fit: xmin chosen by minimal KS over observed values.
/// Throws DegenerateSpectrum when no candidate leaves enough points with
/// two distinct values.
DiscretePowerLaw fit_discrete_power_law(const std::vector<std::uint64_t>& data,
                                        const PowerLawFitOptions& options = {});

/// Draws n values from the fitted model.
std::vector<std::uint64_t> sample_discrete_power_law(double alpha, std::uint64_t xmin,
                                                     std::size_t n, std::uint64_t seed);

struct GofOptions {
  std::size_t resamples = 1000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  PowerLawFitOptions fit;
};

struct GofResult {
  double p_value = 0.0;
  DiscretePowerLaw fit;
  std::size_t resamples = 0;
};

/// Semi-parametric bootstrap: synthetic sets keep the empirical body below
/// xmin and draw the tail from the fitted law, each refitted in full.
/// Throws InvalidArgument for fewer than 100 resamples, DegenerateSpectrum.
GofResult gof_bootstrap(const std::vector<std::uint64_t>& data, const GofOptions& options = {});
GofResult gof_bootstrap(const FrequencySpectrum& spec, const GofOptions& options = {});

}  // namespace sqltpl
