#pragma once

// Cluster extraction from a converged state and the purity scores
//
//   ACP = (1/Q) sum_q sum_r P(d_r | c_q)^2
//   ALP = (1/R) sum_r sum_q P(c_q | d_r)^2
//   K   = sqrt(ACP * ALP)
//
// with P(.|.) the empirical frequencies of a cluster x label contingency table.

#include "mslab/state.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mslab {

struct Clustering
{
  std::vector<std::size_t> labels; // 0..count()-1, numbered by first member
  std::vector<std::vector<double>> centers;
  std::vector<std::size_t> sizes;

  std::size_t count() const noexcept { return sizes.size(); }
};

namespace detail {

class DisjointSets
{
public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x)
  {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b)
  {
    a = find(a);
    b = find(b);
    if (a != b)
      parent_[std::max(a, b)] = std::min(a, b);
  }

private:
  std::vector<std::size_t> parent_;
};

} // namespace detail

/// Single-linkage components of the graph {(i, j) : |x_i - x_j| < merge_radius}.
inline Clustering extract_clusters(const State& state, double merge_radius)
{
  if (!(merge_radius > 0.0))
    throw std::invalid_argument("merge radius must be positive");
  const std::size_t n = state.size();
  const double r2 = merge_radius * merge_radius;
  detail::DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (squared_distance(state.point(i), state.point(j)) < r2)
        sets.unite(i, j);

  Clustering out;
  out.labels.resize(n);
  std::map<std::size_t, std::size_t> root_to_label;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [it, fresh] = root_to_label.try_emplace(sets.find(i), root_to_label.size());
    if (fresh) {
      out.sizes.push_back(0);
      out.centers.emplace_back(state.dim(), 0.0);
    }
    const std::size_t label = it->second;
    out.labels[i] = label;
    ++out.sizes[label];
    const auto p = state.point(i);
    for (std::size_t k = 0; k < state.dim(); ++k)
      out.centers[label][k] += p[k];
  }
  for (std::size_t q = 0; q < out.count(); ++q)
    for (double& c : out.centers[q])
      c /= static_cast<double>(out.sizes[q]);
  return out;
}

//! Cluster x label counts with empty rows and columns removed.
class ContingencyTable
{
public:
  explicit ContingencyTable(std::vector<std::vector<std::size_t>> counts)
  {
    const std::size_t cols = counts.empty() ? 0 : counts.front().size();
    for (const auto& row : counts)
      if (row.size() != cols)
        throw std::invalid_argument("ragged contingency table");
    std::vector<bool> keep_col(cols, false);
    for (const auto& row : counts)
      for (std::size_t r = 0; r < cols; ++r)
        keep_col[r] = keep_col[r] || row[r] > 0;
    for (const auto& row : counts) {
      std::vector<std::size_t> kept;
      for (std::size_t r = 0; r < cols; ++r)
        if (keep_col[r])
          kept.push_back(row[r]);
      if (std::any_of(kept.begin(), kept.end(), [](std::size_t c) { return c > 0; }))
        counts_.push_back(std::move(kept));
    }
    if (counts_.empty())
      throw std::invalid_argument("contingency table has no counts");
    row_sums_.assign(rows(), 0);
    col_sums_.assign(cols_of_first(), 0);
    for (std::size_t q = 0; q < rows(); ++q)
      for (std::size_t r = 0; r < columns(); ++r) {
        row_sums_[q] += counts_[q][r];
        col_sums_[r] += counts_[q][r];
      }
  }

  std::size_t rows() const noexcept { return counts_.size(); }
  std::size_t columns() const noexcept { return col_sums_.size(); }
  std::size_t at(std::size_t q, std::size_t r) const { return counts_.at(q).at(r); }
  std::size_t row_sum(std::size_t q) const { return row_sums_.at(q); }
  std::size_t col_sum(std::size_t r) const { return col_sums_.at(r); }
  std::size_t total() const noexcept
  {
    return std::accumulate(row_sums_.begin(), row_sums_.end(), std::size_t{0});
  }
  const std::vector<std::vector<std::size_t>>& counts() const noexcept { return counts_; }

private:
  std::size_t cols_of_first() const noexcept { return counts_.front().size(); }

  std::vector<std::vector<std::size_t>> counts_;
  std::vector<std::size_t> row_sums_;
  std::vector<std::size_t> col_sums_;
};

/// Rows follow predicted labels, columns follow distinct truth labels in ascending order.
inline ContingencyTable contingency(const std::vector<std::size_t>& predicted,
                                    const std::vector<int>& truth)
{
  if (predicted.size() != truth.size())
    throw std::invalid_argument("prediction has " + std::to_string(predicted.size()) +
                                " labels but truth has " + std::to_string(truth.size()));
  std::map<int, std::size_t> columns;
  for (int t : truth)
    columns.emplace(t, 0);
  std::size_t next = 0;
  for (auto& [label, col] : columns)
    col = next++;
  const std::size_t rows =
    predicted.empty() ? 0 : *std::max_element(predicted.begin(), predicted.end()) + 1;
  std::vector<std::vector<std::size_t>> counts(rows, std::vector<std::size_t>(columns.size(), 0));
  for (std::size_t i = 0; i < predicted.size(); ++i)
    ++counts[predicted[i]][columns.at(truth[i])];
  return ContingencyTable(std::move(counts));
}

inline ContingencyTable contingency(const Clustering& predicted, const std::vector<int>& truth)
{
  return contingency(predicted.labels, truth);
}

inline double acp(const ContingencyTable& t)
{
  double total = 0.0;
  for (std::size_t q = 0; q < t.rows(); ++q) {
    const double row = static_cast<double>(t.row_sum(q));
    double purity = 0.0;
    for (std::size_t r = 0; r < t.columns(); ++r) {
      const double p = static_cast<double>(t.at(q, r)) / row;
      purity += p * p;
    }
    total += purity;
  }
  return total / static_cast<double>(t.rows());
}

inline double alp(const ContingencyTable& t)
{
  double total = 0.0;
  for (std::size_t r = 0; r < t.columns(); ++r) {
    const double col = static_cast<double>(t.col_sum(r));
    double purity = 0.0;
    for (std::size_t q = 0; q < t.rows(); ++q) {
      const double p = static_cast<double>(t.at(q, r)) / col;
      purity += p * p;
    }
    total += purity;
  }
  return total / static_cast<double>(t.columns());
}

inline double k_score(const ContingencyTable& t) { return std::sqrt(acp(t) * alp(t)); }

struct ClusterMetrics
{
  std::size_t cluster_count = 0;
  double acp = 0.0;
  double alp = 0.0;
  double k = 0.0;
};

inline ClusterMetrics evaluate(const Clustering& c, const std::vector<int>& truth)
{
  const ContingencyTable t = contingency(c, truth);
  return {c.count(), acp(t), alp(t), k_score(t)};
}

} // namespace mslab
