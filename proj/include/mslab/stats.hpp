#pragma once

#include "mslab/random.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace mslab {

struct Interval
{
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  double half_width() const noexcept { return 0.5 * (hi - lo); }
  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

enum class CiMethod
{
  student_t,
  bootstrap
};

inline double sample_mean(std::span<const double> xs)
{
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Unbiased sample standard deviation.
inline double sample_stddev(std::span<const double> xs)
{
  const double m = sample_mean(xs);
  double ss = 0.0;
  for (double x : xs)
    ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// mean +- t_{(1+level)/2, n-1} * s / sqrt(n).
inline Interval aggregate_ci(std::span<const double> samples, double level = 0.90)
{
  if (samples.size() < 2)
    throw std::invalid_argument("confidence interval needs at least two samples");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  const double n = static_cast<double>(samples.size());
  const double mean = sample_mean(samples);
  const double s = sample_stddev(samples);
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(dist, 0.5 + 0.5 * level);
  const double half = t * s / std::sqrt(n);
  return {mean, mean - half, mean + half};
}

/// Percentile bootstrap of the mean.
inline Interval bootstrap_ci(std::span<const double> samples,
                             double level = 0.90,
                             std::size_t resamples = 2000,
                             std::uint64_t seed = 0)
{
  if (samples.size() < 2)
    throw std::invalid_argument("confidence interval needs at least two samples");
  RandomStream rng(seed);
  std::vector<double> means(resamples);
  for (double& m : means) {
    double s = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j)
      s += samples[rng.index(samples.size())];
    m = s / static_cast<double>(samples.size());
  }
  std::sort(means.begin(), means.end());
  const double tail = 0.5 * (1.0 - level);
  auto at = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(resamples - 1)));
    return means[std::min(idx, resamples - 1)];
  };
  const double mean = sample_mean(samples);
  return {mean, std::min(mean, at(tail)), std::max(mean, at(1.0 - tail))};
}

inline Interval summarize(std::span<const double> samples, CiMethod method, double level = 0.90)
{
  return method == CiMethod::student_t ? aggregate_ci(samples, level)
                                       : bootstrap_ci(samples, level);
}

} // namespace mslab
