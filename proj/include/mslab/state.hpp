#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mslab {

//! Ordered collection of n points in R^d, stored row-major.
class State
{
public:
  State(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords))
  {
    if (dim_ == 0)
      throw std::invalid_argument("state dimension must be at least 1");
    if (coords_.empty() || coords_.size() % dim_ != 0)
      throw std::invalid_argument("state needs a positive multiple of " + std::to_string(dim_) +
                                  " coordinates, got " + std::to_string(coords_.size()));
    for (double c : coords_)
      if (!std::isfinite(c))
        throw std::invalid_argument("state coordinates must be finite");
  }

  static State from_rows(std::initializer_list<std::initializer_list<double>> rows)
  {
    if (rows.size() == 0)
      throw std::invalid_argument("state needs at least one point");
    const std::size_t dim = rows.begin()->size();
    std::vector<double> coords;
    coords.reserve(rows.size() * dim);
    for (const auto& row : rows) {
      if (row.size() != dim)
        throw std::invalid_argument("ragged rows");
      coords.insert(coords.end(), row.begin(), row.end());
    }
    return State(dim, std::move(coords));
  }

  std::size_t size() const noexcept { return coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> point(std::size_t i) const noexcept
  {
    return {coords_.data() + i * dim_, dim_};
  }

  void set_point(std::size_t i, std::span<const double> p) noexcept
  {
    std::copy(p.begin(), p.end(), coords_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
  }

  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const State&, const State&) = default;

private:
  std::size_t dim_;
  std::vector<double> coords_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept
{
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) noexcept
{
  return std::sqrt(squared_distance(a, b));
}

/// Axis-aligned bounding box; a necessary condition for convex-hull membership.
struct BoundingBox
{
  std::vector<double> lo;
  std::vector<double> hi;

  static BoundingBox of(const State& s)
  {
    BoundingBox box{std::vector<double>(s.point(0).begin(), s.point(0).end()),
                    std::vector<double>(s.point(0).begin(), s.point(0).end())};
    for (std::size_t i = 1; i < s.size(); ++i) {
      const auto p = s.point(i);
      for (std::size_t k = 0; k < s.dim(); ++k) {
        box.lo[k] = std::min(box.lo[k], p[k]);
        box.hi[k] = std::max(box.hi[k], p[k]);
      }
    }
    return box;
  }

  bool contains(std::span<const double> p, double slack = 0.0) const noexcept
  {
    for (std::size_t k = 0; k < p.size(); ++k)
      if (p[k] < lo[k] - slack || p[k] > hi[k] + slack)
        return false;
    return true;
  }
};

} // namespace mslab
