#pragma once

// Seeded isotropic Gaussian mixtures. Points are drawn component by
// component, coordinate by coordinate, as mean + sigma * z with z from
// RandomStream::normal (Box-Muller over mt19937_64).

#include "mslab/random.hpp"
#include "mslab/state.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace mslab {

struct GmmComponent
{
  std::vector<double> mean;
  double variance = 1.0; // sigma^2, covariance is variance * I
  std::size_t count = 1;
};

struct GmmSpec
{
  std::vector<GmmComponent> components;

  void validate() const
  {
    if (components.empty())
      throw std::invalid_argument("mixture needs at least one component");
    const std::size_t dim = components.front().mean.size();
    if (dim == 0)
      throw std::invalid_argument("component means must be non-empty");
    for (const auto& c : components) {
      if (c.mean.size() != dim)
        throw std::invalid_argument("component means differ in dimension");
      if (!(c.variance > 0.0))
        throw std::invalid_argument("component variance must be positive");
      if (c.count < 1)
        throw std::invalid_argument("component count must be at least 1");
    }
  }

  std::size_t total() const noexcept
  {
    std::size_t n = 0;
    for (const auto& c : components)
      n += c.count;
    return n;
  }
};

/// Whether the 0.65 of the reference mixture is read as variance or standard deviation.
enum class SpreadReading
{
  variance,
  stddev
};

inline constexpr double reference_spread = 0.65;

/// Three components at (1,1), (-1,-1), (1,-1), covariance 0.65 I, equal counts.
inline GmmSpec three_cluster_spec(std::size_t n_per_cluster, SpreadReading reading = SpreadReading::variance)
{
  if (n_per_cluster < 1)
    throw std::invalid_argument("need at least one point per cluster");
  const double variance =
    reading == SpreadReading::variance ? reference_spread : reference_spread * reference_spread;
  return GmmSpec{{{{1.0, 1.0}, variance, n_per_cluster},
                  {{-1.0, -1.0}, variance, n_per_cluster},
                  {{1.0, -1.0}, variance, n_per_cluster}}};
}

/// m components with means evenly spaced on a circle of the given radius.
inline GmmSpec circle_spec(std::size_t m, std::size_t n_per_cluster, double radius = 2.0,
                           double variance = reference_spread)
{
  GmmSpec spec;
  for (std::size_t c = 0; c < m; ++c) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(m);
    spec.components.push_back({{radius * std::cos(angle), radius * std::sin(angle)}, variance,
                               n_per_cluster});
  }
  return spec;
}

struct LabeledData
{
  State points;
  std::vector<int> labels; // empty when the source carried no labels

  bool has_labels() const noexcept { return !labels.empty(); }
};

inline LabeledData generate(const GmmSpec& spec, std::uint64_t seed)
{
  spec.validate();
  RandomStream rng(seed);
  const std::size_t dim = spec.components.front().mean.size();
  std::vector<double> coords;
  coords.reserve(spec.total() * dim);
  std::vector<int> labels;
  labels.reserve(spec.total());
  for (std::size_t c = 0; c < spec.components.size(); ++c) {
    const auto& comp = spec.components[c];
    const double sigma = std::sqrt(comp.variance);
    for (std::size_t j = 0; j < comp.count; ++j) {
      for (std::size_t k = 0; k < dim; ++k)
        coords.push_back(comp.mean[k] + sigma * rng.normal());
      labels.push_back(static_cast<int>(c));
    }
  }
  return {State(dim, std::move(coords)), std::move(labels)};
}

} // namespace mslab
