#pragma once

// Mean-shift operator, neighbourhoods, and the pairwise objective
//
//   L_h(X) = sum_{i <= j} K((x_i - x_j) / h)
//
// together with its partial gradients
//
//   grad_i L_h(X) = (2 / h^2) sum_{j != i} G((x_i - x_j) / h) (x_j - x_i).
//
// Membership tests and weights share one predicate, |x - y|^2 / h^2 < 1, so a
// point is a neighbour exactly when its weight is nonzero.

#include "mslab/kernel.hpp"
#include "mslab/state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace mslab {

namespace detail {

inline void require_positive_bandwidth(double h)
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("bandwidth must be positive and finite");
}

inline double scaled_sq(double d2, double h) noexcept { return d2 / (h * h); }

} // namespace detail

struct ShiftOutcome
{
  std::vector<double> new_point;
  double shift_norm = 0.0;
  std::size_t neighbor_count = 0;
  double weight_sum = 0.0;

  /// No sample point lies within h of the query; new_point is the query itself.
  bool isolated() const noexcept { return neighbor_count == 0; }
};

/// Summary of one mean-shift evaluation written into a caller-owned buffer.
struct ShiftStats
{
  double shift_norm = 0.0;
  std::size_t neighbor_count = 0;
  double weight_sum = 0.0;
};

/// Indices i with |x - x_i| < h, ascending.
inline std::vector<std::size_t> neighborhood(const State& state, std::span<const double> x, double h)
{
  detail::require_positive_bandwidth(h);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (detail::scaled_sq(squared_distance(x, state.point(i)), h) < 1.0)
      out.push_back(i);
  return out;
}

/// S_h(x; X) written to `out` (which may not alias the state). An isolated
/// query is copied through unchanged.
inline ShiftStats mean_shift_into(const State& state,
                                  std::span<const double> x,
                                  double h,
                                  const Profile& profile,
                                  std::span<double> out)
{
  const std::size_t dim = state.dim();
  ShiftStats stats;
  std::size_t last = 0;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto xi = state.point(i);
    const double w = profile.weight_sq(detail::scaled_sq(squared_distance(x, xi), h));
    if (w == 0.0)
      continue;
    ++stats.neighbor_count;
    last = i;
    stats.weight_sum += w;
    for (std::size_t k = 0; k < dim; ++k)
      out[k] += w * xi[k];
  }
  if (stats.neighbor_count == 0) {
    std::copy(x.begin(), x.end(), out.begin());
    return stats;
  }
  if (stats.neighbor_count == 1) {
    const auto only = state.point(last);
    std::copy(only.begin(), only.end(), out.begin());
  } else {
    for (std::size_t k = 0; k < dim; ++k)
      out[k] /= stats.weight_sum;
  }
  stats.shift_norm = std::sqrt(squared_distance(out, x));
  return stats;
}

inline ShiftOutcome mean_shift_op(const State& state,
                                  std::span<const double> x,
                                  double h,
                                  const Profile& profile)
{
  detail::require_positive_bandwidth(h);
  if (x.size() != state.dim())
    throw std::invalid_argument("query dimension does not match state");
  ShiftOutcome outcome;
  outcome.new_point.resize(state.dim());
  const ShiftStats stats = mean_shift_into(state, x, h, profile, outcome.new_point);
  outcome.shift_norm = stats.shift_norm;
  outcome.neighbor_count = stats.neighbor_count;
  outcome.weight_sum = stats.weight_sum;
  return outcome;
}

/// Sum over 1 <= i <= j <= n of K((x_i - x_j)/h); includes the n diagonal terms.
inline double objective_L(const State& state, double h, const Profile& profile)
{
  detail::require_positive_bandwidth(h);
  const std::size_t n = state.size();
  double cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = state.point(i);
    for (std::size_t j = i + 1; j < n; ++j)
      cross += profile.value_sq(detail::scaled_sq(squared_distance(xi, state.point(j)), h));
  }
  return static_cast<double>(n) * profile.value_sq(0.0) + cross;
}

inline std::vector<double> partial_gradient(const State& state,
                                            std::size_t i,
                                            double h,
                                            const Profile& profile)
{
  detail::require_positive_bandwidth(h);
  if (i >= state.size())
    throw std::out_of_range("point index out of range");
  const std::size_t dim = state.dim();
  const auto xi = state.point(i);
  std::vector<double> grad(dim, 0.0);
  for (std::size_t j = 0; j < state.size(); ++j) {
    if (j == i)
      continue;
    const auto xj = state.point(j);
    const double w = profile.weight_sq(detail::scaled_sq(squared_distance(xi, xj), h));
    if (w == 0.0)
      continue;
    for (std::size_t k = 0; k < dim; ++k)
      grad[k] += w * (xj[k] - xi[k]);
  }
  const double scale = 2.0 / (h * h);
  for (double& g : grad)
    g *= scale;
  return grad;
}

/// max_i |grad_i L_h(X)|_2.
inline double full_gradient_maxnorm(const State& state, double h, const Profile& profile)
{
  double best = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    double s = 0.0;
    for (double g : partial_gradient(state, i, h, profile))
      s += g * g;
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

/// True iff every pair either (nearly) coincides or is (nearly) at least h apart.
inline bool is_critical(const State& state, double h, double tol)
{
  detail::require_positive_bandwidth(h);
  if (tol < 0.0)
    throw std::invalid_argument("tolerance must be non-negative");
  const std::size_t n = state.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = distance(state.point(i), state.point(j));
      if (dist > tol && dist < h - tol)
        return false;
    }
  return true;
}

//! Uniform grid over a fixed point set for fixed-radius neighbour queries.
//!
//! Cells have side `cell_size`; a query with radius h <= cell_size only needs
//! the 3^d surrounding cells. Results are identical to neighborhood().
class GridIndex
{
public:
  GridIndex(const State& state, double cell_size) : state_(&state), cell_(cell_size)
  {
    detail::require_positive_bandwidth(cell_size);
    for (std::size_t i = 0; i < state.size(); ++i)
      cells_[cell_of(state.point(i))].push_back(i);
  }

  std::vector<std::size_t> neighborhood(std::span<const double> x, double h) const
  {
    detail::require_positive_bandwidth(h);
    if (h > cell_)
      throw std::invalid_argument("query radius exceeds grid cell size");
    const std::size_t dim = state_->dim();
    const Key centre = cell_of(x);
    Key probe = centre;
    std::vector<std::size_t> out;
    std::vector<int> offset(dim, -1);
    while (true) {
      for (std::size_t k = 0; k < dim; ++k)
        probe[k] = centre[k] + offset[k];
      if (auto it = cells_.find(probe); it != cells_.end())
        for (std::size_t i : it->second)
          if (detail::scaled_sq(squared_distance(x, state_->point(i)), h) < 1.0)
            out.push_back(i);
      std::size_t k = 0;
      while (k < dim && offset[k] == 1)
        offset[k++] = -1;
      if (k == dim)
        break;
      ++offset[k];
    }
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  using Key = std::vector<std::int64_t>;

  Key cell_of(std::span<const double> p) const
  {
    Key key(p.size());
    for (std::size_t k = 0; k < p.size(); ++k)
      key[k] = static_cast<std::int64_t>(std::floor(p[k] / cell_));
    return key;
  }

  const State* state_;
  double cell_;
  std::map<Key, std::vector<std::size_t>> cells_;
};

} // namespace mslab
