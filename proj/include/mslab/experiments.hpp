#pragma once

// Repeated seeded runs over synthetic mixtures, aggregated with confidence
// intervals.
//
// Seeding: every repetition r of a sweep cell with sweep value v uses
//   cell  = derive_seed(derive_seed(master, r), bits(v))   (data)
//   run   = derive_seed(cell, tag_of("run"))               (all algorithms)
// so adding sweep points or repetitions never changes existing cells. The
// bandwidth-range sweep reuses one dataset per repetition for every width and
// derives its cell seed from (master, r) alone.
//
// Jobs may run on several threads; results are folded in job order, so the
// output does not depend on scheduling.

#include "mslab/clusters.hpp"
#include "mslab/engine.hpp"
#include "mslab/random.hpp"
#include "mslab/stats.hpp"
#include "mslab/synthdata.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace mslab {

struct ExperimentSettings
{
  Profile profile{};
  double bandwidth = 0.6;
  // Table operating point; also the reference range for the width sweep.
  ScheduleParams schedule{};
  std::uint64_t max_iterations = 10'000'000;
  double convergence_threshold = 1e-6;
  std::size_t reps = 100;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  CiMethod ci = CiMethod::student_t;
  double level = 0.90;
  SpreadReading spread = SpreadReading::variance;
  // Lowest h_min the width sweep may use before it widens upward instead.
  double range_floor = 0.1;

  RunConfig config_for(Algorithm algorithm, std::uint64_t seed) const
  {
    RunConfig cfg;
    cfg.algorithm = algorithm;
    cfg.profile = profile;
    cfg.bandwidth = bandwidth;
    cfg.schedule = schedule;
    cfg.max_iterations = max_iterations;
    cfg.convergence_threshold = convergence_threshold;
    cfg.seed = seed;
    return cfg;
  }
};

inline constexpr const char* metric_names[] = {"cluster_count", "acp", "alp", "k"};

struct SweepRow
{
  double sweep_value = 0.0;
  std::string algo;
  std::string metric;
  Interval ci;
  std::size_t reps = 0;
};

struct SweepResult
{
  std::string kind;
  std::string sweep_var;
  std::vector<SweepRow> rows;
  // Per-repetition values keyed by (sweep value, algo, metric), in repetition order.
  std::map<std::tuple<double, std::string, std::string>, std::vector<double>> samples;
  // Per-repetition dataset checksums keyed by (sweep value, algo).
  std::map<std::tuple<double, std::string>, std::vector<std::uint64_t>> data_checksums;
  std::vector<std::string> notes;

  const std::vector<double>& values(double v, const std::string& algo, const std::string& metric) const
  {
    const auto it = samples.find({v, algo, metric});
    if (it == samples.end())
      throw std::out_of_range("no samples for " + algo + "/" + metric);
    return it->second;
  }

  const SweepRow& row(double v, const std::string& algo, const std::string& metric) const
  {
    for (const auto& r : rows)
      if (r.sweep_value == v && r.algo == algo && r.metric == metric)
        return r;
    throw std::out_of_range("no row for " + algo + "/" + metric);
  }
};

struct Observation
{
  double sweep_value = 0.0;
  std::string algo;
  ClusterMetrics metrics;
  std::uint64_t data_checksum = 0;
};

/// Runs one algorithm and scores the extracted clusters against the truth.
inline ClusterMetrics run_and_score(const LabeledData& data, const RunConfig& cfg)
{
  const RunTrace trace = run(data.points, cfg);
  const Clustering clusters = extract_clusters(trace.final_state, 0.5 * cfg.resolution());
  return evaluate(clusters, data.labels);
}

/// Executes jobs on up to `workers` threads and returns their outputs in job order.
template <typename T>
std::vector<T> run_jobs(const std::vector<std::function<T()>>& jobs, unsigned workers)
{
  std::vector<T> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        out[j] = jobs[j]();
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < count; ++t)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);
  return out;
}

namespace detail {

inline std::uint64_t cell_seed(std::uint64_t master, std::size_t rep, double value)
{
  return derive_seed(derive_seed(master, rep), std::bit_cast<std::uint64_t>(value));
}

inline SweepResult fold(std::string kind,
                        std::string sweep_var,
                        const std::vector<std::vector<Observation>>& per_job,
                        const ExperimentSettings& settings)
{
  SweepResult result{std::move(kind), std::move(sweep_var), {}, {}, {}, {}};
  for (const auto& job : per_job)
    for (const auto& obs : job) {
      const ClusterMetrics& m = obs.metrics;
      const double values[] = {static_cast<double>(m.cluster_count), m.acp, m.alp, m.k};
      for (std::size_t i = 0; i < 4; ++i)
        result.samples[{obs.sweep_value, obs.algo, metric_names[i]}].push_back(values[i]);
      result.data_checksums[{obs.sweep_value, obs.algo}].push_back(obs.data_checksum);
    }
  for (const auto& [key, values] : result.samples) {
    const auto& [v, algo, metric] = key;
    result.rows.push_back({v, algo, metric, summarize(values, settings.ci, settings.level), values.size()});
  }
  return result;
}

inline void require_reps(const ExperimentSettings& s)
{
  if (s.reps < 2)
    throw std::invalid_argument("sweeps need at least two repetitions");
}

} // namespace detail

/// Cluster counts of MS, BMS, SMS and DSMS on the three-component mixture
/// with N points per component, for each N.
inline SweepResult sweep_sparse(const ExperimentSettings& s,
                                const std::vector<std::size_t>& n_values,
                                const std::vector<Algorithm>& algorithms = {Algorithm::ms, Algorithm::bms,
                                                                            Algorithm::sms, Algorithm::dsms})
{
  detail::require_reps(s);
  std::vector<std::function<std::vector<Observation>()>> jobs;
  for (std::size_t n : n_values)
    for (std::size_t rep = 0; rep < s.reps; ++rep)
      jobs.emplace_back([&s, &algorithms, n, rep] {
        const double v = static_cast<double>(n);
        const std::uint64_t seed = detail::cell_seed(s.master_seed, rep, v);
        const LabeledData data = generate(three_cluster_spec(n, s.spread), seed);
        const std::uint64_t sum = checksum(data.points.coords());
        std::vector<Observation> out;
        for (Algorithm a : algorithms)
          out.push_back({v, std::string(to_string(a)),
                         run_and_score(data, s.config_for(a, derive_seed(seed, tag_of("run")))), sum});
        return out;
      });
  return detail::fold("sparse", "n_per_cluster", run_jobs(jobs, s.workers), s);
}

struct BandwidthRange
{
  double h_min = 0.0;
  double h_max = 0.0;
  bool clamped = false;
};

/// Range of width w around h_init that splits the width in the same
/// proportion as the reference range; if h_min would fall below `floor`, it
/// is pinned there and the range extends upward to keep the width.
inline BandwidthRange range_for_width(double width, const ScheduleParams& reference, double floor)
{
  if (width < 0.0)
    throw std::invalid_argument("bandwidth width must be non-negative");
  const double ref_width = reference.h_max - reference.h_min;
  const double scale = ref_width > 0.0 ? width / ref_width : 0.0;
  BandwidthRange r{reference.h_init - (reference.h_init - reference.h_min) * scale,
                   reference.h_init + (reference.h_max - reference.h_init) * scale, false};
  if (width == ref_width) {
    r.h_min = reference.h_min;
    r.h_max = reference.h_max;
  }
  if (r.h_min < floor) {
    r.h_min = floor;
    r.h_max = floor + width;
    r.clamped = true;
  }
  return r;
}

/// DSMS scores against bandwidth-range width, one shared dataset per
/// repetition (100 points per component); the SMS baseline at h_init is
/// recorded at sweep value 0 under algo "sms".
inline SweepResult sweep_bandwidth_range(const ExperimentSettings& s,
                                         const std::vector<double>& widths,
                                         std::size_t n_per_cluster = 100)
{
  detail::require_reps(s);
  std::vector<std::string> notes;
  for (double w : widths) {
    const BandwidthRange r = range_for_width(w, s.schedule, s.range_floor);
    if (r.clamped) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "width %.17g: h_min clamped to %.17g, range [%.17g, %.17g]", w,
                    r.h_min, r.h_min, r.h_max);
      notes.emplace_back(buf);
    }
  }
  std::vector<std::function<std::vector<Observation>()>> jobs;
  for (std::size_t rep = 0; rep < s.reps; ++rep)
    jobs.emplace_back([&s, &widths, n_per_cluster, rep] {
      const std::uint64_t seed = derive_seed(s.master_seed, rep);
      const std::uint64_t run_seed = derive_seed(seed, tag_of("run"));
      const LabeledData data = generate(three_cluster_spec(n_per_cluster, s.spread), seed);
      const std::uint64_t sum = checksum(data.points.coords());
      std::vector<Observation> out;
      RunConfig sms = s.config_for(Algorithm::sms, run_seed);
      sms.bandwidth = s.schedule.h_init;
      out.push_back({0.0, "sms", run_and_score(data, sms), sum});
      for (double w : widths) {
        const BandwidthRange r = range_for_width(w, s.schedule, s.range_floor);
        RunConfig cfg = s.config_for(Algorithm::dsms, run_seed);
        cfg.schedule.h_min = r.h_min;
        cfg.schedule.h_max = r.h_max;
        out.push_back({w, "dsms", run_and_score(data, cfg), checksum(data.points.coords())});
      }
      return out;
    });
  SweepResult result = detail::fold("range", "width", run_jobs(jobs, s.workers), s);
  result.notes = std::move(notes);
  return result;
}

/// Two components at (1,1) and (-1,-1) with `total` points split in ratio r
/// (smaller : larger = r : 1 for r <= 1); SMS and DSMS.
inline SweepResult sweep_imbalance(const ExperimentSettings& s,
                                   const std::vector<double>& ratios,
                                   std::size_t total = 200)
{
  detail::require_reps(s);
  const double variance = s.spread == SpreadReading::variance ? reference_spread
                                                              : reference_spread * reference_spread;
  std::vector<std::function<std::vector<Observation>()>> jobs;
  for (double r : ratios) {
    if (!(r > 0.0))
      throw std::invalid_argument("imbalance ratio must be positive");
    for (std::size_t rep = 0; rep < s.reps; ++rep)
      jobs.emplace_back([&s, r, rep, total, variance] {
        const auto first = static_cast<std::size_t>(
          std::llround(static_cast<double>(total) * r / (1.0 + r)));
        const std::size_t a = std::clamp<std::size_t>(first, 1, total - 1);
        const GmmSpec spec{{{{1.0, 1.0}, variance, a}, {{-1.0, -1.0}, variance, total - a}}};
        const std::uint64_t seed = detail::cell_seed(s.master_seed, rep, r);
        const LabeledData data = generate(spec, seed);
        const std::uint64_t sum = checksum(data.points.coords());
        const std::uint64_t run_seed = derive_seed(seed, tag_of("run"));
        return std::vector<Observation>{
          {r, "sms", run_and_score(data, s.config_for(Algorithm::sms, run_seed)), sum},
          {r, "dsms", run_and_score(data, s.config_for(Algorithm::dsms, run_seed)), sum}};
      });
  }
  return detail::fold("imbalance", "ratio", run_jobs(jobs, s.workers), s);
}

/// m components on a circle of radius 2, variance 0.65, 100 points each; SMS and DSMS.
inline SweepResult sweep_cluster_count(const ExperimentSettings& s,
                                       const std::vector<std::size_t>& m_values,
                                       std::size_t n_per_cluster = 100)
{
  detail::require_reps(s);
  const double variance = s.spread == SpreadReading::variance ? reference_spread
                                                              : reference_spread * reference_spread;
  std::vector<std::function<std::vector<Observation>()>> jobs;
  for (std::size_t m : m_values) {
    if (m < 2)
      throw std::invalid_argument("cluster-count sweep needs m >= 2");
    for (std::size_t rep = 0; rep < s.reps; ++rep)
      jobs.emplace_back([&s, m, rep, n_per_cluster, variance] {
        const double v = static_cast<double>(m);
        const std::uint64_t seed = detail::cell_seed(s.master_seed, rep, v);
        const LabeledData data = generate(circle_spec(m, n_per_cluster, 2.0, variance), seed);
        const std::uint64_t sum = checksum(data.points.coords());
        const std::uint64_t run_seed = derive_seed(seed, tag_of("run"));
        return std::vector<Observation>{
          {v, "sms", run_and_score(data, s.config_for(Algorithm::sms, run_seed)), sum},
          {v, "dsms", run_and_score(data, s.config_for(Algorithm::dsms, run_seed)), sum}};
      });
  }
  return detail::fold("count", "clusters", run_jobs(jobs, s.workers), s);
}

} // namespace mslab
