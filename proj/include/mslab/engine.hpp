#pragma once

// The four mean-shift variants.
//
//   MS   each point follows its own trajectory y <- S_h(y; X0) against the
//        original sample.
//   BMS  synchronous sweeps: every point is replaced by S_h(x_i; X) computed
//        from the same snapshot of the current state.
//   SMS  one uniformly drawn point is replaced in place by S_h(x_i; X) per
//        step, so later draws see the updated state.
//   DSMS SMS with a fresh bandwidth h_{k+1} from BandwidthSchedule per step.
//
// Index and bandwidth draws use two sub-streams derived from the run seed, so
// SMS and DSMS with the same seed draw the same index sequence.

#include "mslab/core.hpp"
#include "mslab/kernel.hpp"
#include "mslab/random.hpp"
#include "mslab/schedule.hpp"
#include "mslab/state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mslab {

enum class Algorithm
{
  ms,
  bms,
  sms,
  dsms
};

enum class TraceLevel
{
  off,
  shifts,
  full
};

enum class StopReason
{
  converged,
  max_iter
};

inline std::string_view to_string(Algorithm a) noexcept
{
  switch (a) {
    case Algorithm::ms: return "ms";
    case Algorithm::bms: return "bms";
    case Algorithm::sms: return "sms";
    case Algorithm::dsms: return "dsms";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s)
{
  if (s == "ms")
    return Algorithm::ms;
  if (s == "bms")
    return Algorithm::bms;
  if (s == "sms")
    return Algorithm::sms;
  if (s == "dsms")
    return Algorithm::dsms;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

inline std::string_view to_string(TraceLevel t) noexcept
{
  switch (t) {
    case TraceLevel::off: return "off";
    case TraceLevel::shifts: return "shifts";
    case TraceLevel::full: return "full";
  }
  return "?";
}

inline TraceLevel parse_trace_level(std::string_view s)
{
  if (s == "off")
    return TraceLevel::off;
  if (s == "shifts")
    return TraceLevel::shifts;
  if (s == "full")
    return TraceLevel::full;
  throw std::invalid_argument("unknown trace level '" + std::string(s) + "'");
}

inline std::string_view to_string(StopReason r) noexcept
{
  return r == StopReason::converged ? "converged" : "max_iter";
}

struct ScheduleParams
{
  double h_min = 0.2;
  double h_max = 1.6;
  double h_init = 0.6;
  NuSpec nu = NuSpec::inverse_log();
};

struct RunConfig
{
  Algorithm algorithm = Algorithm::dsms;
  Profile profile{};
  double bandwidth = 0.6;
  ScheduleParams schedule{};
  std::uint64_t max_iterations = 10'000'000;
  double convergence_threshold = 1e-6;
  std::uint64_t seed = 0;
  TraceLevel trace_level = TraceLevel::off;
  // Share of points that must have a small last shift for SMS/DSMS to stop.
  double diagnosis_fraction = 1.0;
  // With trace_level == full, objective and gradient are only recorded for
  // the first this-many steps (0 = every step).
  std::uint64_t full_trace_steps = 0;
  // Mutation used to demonstrate the theory checks: SMS/DSMS shift against
  // the original sample instead of the current state.
  bool shift_against_origin = false;

  void validate() const
  {
    if (max_iterations < 1)
      throw std::invalid_argument("max_iterations must be at least 1");
    if (!(convergence_threshold > 0.0))
      throw std::invalid_argument("convergence_threshold must be positive");
    if (!(diagnosis_fraction > 0.0 && diagnosis_fraction <= 1.0))
      throw std::invalid_argument("diagnosis_fraction must lie in (0, 1]");
    if (algorithm == Algorithm::dsms)
      BandwidthSchedule(schedule.h_min, schedule.h_max, schedule.h_init, schedule.nu);
    else
      detail::require_positive_bandwidth(bandwidth);
  }

  /// Bandwidth used to extract clusters: h_min for DSMS, h otherwise.
  double resolution() const noexcept
  {
    return algorithm == Algorithm::dsms ? schedule.h_min : bandwidth;
  }
};

inline constexpr std::size_t no_index = std::numeric_limits<std::size_t>::max();

struct StepRecord
{
  std::uint64_t step = 0;
  // Updated point (SMS/DSMS), trajectory (MS) or no_index (BMS sweep).
  std::size_t index = no_index;
  double bandwidth = 0.0;
  // Displacement of the updated point; for BMS the largest over the sweep.
  double shift_norm = 0.0;
  // Denominator of the mean-shift average (SMS/DSMS/MS).
  double weight_sum = 0.0;
  // trace_level == full only:
  std::optional<double> objective_before; // L_{h_{k+1}}(X^(k))
  std::optional<double> objective_after;  // L_{h_{k+1}}(X^(k+1))
  std::optional<double> gradient_norm;    // |grad_{i_k} L_{h_{k+1}}(X^(k))|

  /// |grad_{i_k} L| recovered from the shift: (2/h^2) * weight_sum * shift.
  double implied_gradient_norm() const noexcept
  {
    return 2.0 / (bandwidth * bandwidth) * weight_sum * shift_norm;
  }
};

struct RunTrace
{
  Algorithm algorithm = Algorithm::dsms;
  std::vector<StepRecord> steps;
  State final_state;
  std::uint64_t iterations_used = 0;
  StopReason stop_reason = StopReason::max_iter;
  // MS trajectories that started with no neighbour; they stay at their origin.
  std::vector<std::size_t> isolated;
  double min_bandwidth = 0.0;
  double max_bandwidth = 0.0;
};

//! Convergence diagnosis for single-point updates.
//!
//! Tracks the most recent shift of every point (initially +inf). Every
//! `window` draws the run may stop once ceil(fraction * n) points have a last
//! shift below the threshold; with fraction 1 every point must have been
//! drawn at least once.
class ConvergenceMonitor
{
public:
  ConvergenceMonitor(std::size_t n, double threshold, double fraction = 1.0)
    : last_(n, std::numeric_limits<double>::infinity()),
      threshold_(threshold),
      required_(static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)))
  {
    required_ = std::clamp<std::size_t>(required_, 1, n);
  }

  void record(std::size_t i, double shift) noexcept { last_[i] = shift; }

  std::size_t window() const noexcept { return last_.size(); }

  bool converged() const noexcept
  {
    std::size_t below = 0;
    for (double s : last_)
      below += s < threshold_ ? 1 : 0;
    return below >= required_;
  }

  double last_shift(std::size_t i) const noexcept { return last_[i]; }

private:
  std::vector<double> last_;
  double threshold_;
  std::size_t required_;
};

namespace detail {

inline bool records_full(const RunConfig& cfg, std::uint64_t step) noexcept
{
  return cfg.trace_level == TraceLevel::full &&
         (cfg.full_trace_steps == 0 || step <= cfg.full_trace_steps);
}

inline void require_algorithm(const RunConfig& cfg, Algorithm expected)
{
  cfg.validate();
  if (cfg.algorithm != expected)
    throw std::invalid_argument("config is for " + std::string(to_string(cfg.algorithm)) +
                                ", not " + std::string(to_string(expected)));
}

// Shared SMS/DSMS loop; `next_bandwidth` yields h_{k+1} for each step.
template <typename NextBandwidth>
RunTrace run_single_point(const State& data, const RunConfig& cfg, NextBandwidth next_bandwidth)
{
  const std::size_t n = data.size();
  const std::size_t dim = data.dim();
  RandomStream index_stream(derive_seed(cfg.seed, tag_of("index")));

  RunTrace trace{cfg.algorithm, {}, data, 0, StopReason::max_iter, {}, 0.0, 0.0};
  State& state = trace.final_state;
  ConvergenceMonitor monitor(n, cfg.convergence_threshold, cfg.diagnosis_fraction);
  std::vector<double> buffer(dim);
  trace.min_bandwidth = std::numeric_limits<double>::infinity();
  trace.max_bandwidth = 0.0;

  for (std::uint64_t k = 1; k <= cfg.max_iterations; ++k) {
    const std::size_t i = index_stream.index(n);
    const double h = next_bandwidth();
    trace.min_bandwidth = std::min(trace.min_bandwidth, h);
    trace.max_bandwidth = std::max(trace.max_bandwidth, h);

    StepRecord rec;
    const bool full = records_full(cfg, k);
    if (full) {
      rec.objective_before = objective_L(state, h, cfg.profile);
      const auto g = partial_gradient(state, i, h, cfg.profile);
      double s = 0.0;
      for (double c : g)
        s += c * c;
      rec.gradient_norm = std::sqrt(s);
    }

    const State& reference = cfg.shift_against_origin ? data : state;
    const ShiftStats stats = mean_shift_into(reference, state.point(i), h, cfg.profile, buffer);
    state.set_point(i, buffer);
    monitor.record(i, stats.shift_norm);

    if (cfg.trace_level != TraceLevel::off) {
      rec.step = k;
      rec.index = i;
      rec.bandwidth = h;
      rec.shift_norm = stats.shift_norm;
      rec.weight_sum = stats.weight_sum;
      if (full)
        rec.objective_after = objective_L(state, h, cfg.profile);
      trace.steps.push_back(rec);
    }
    trace.iterations_used = k;
    if (k % monitor.window() == 0 && monitor.converged()) {
      trace.stop_reason = StopReason::converged;
      break;
    }
  }
  return trace;
}

} // namespace detail

inline RunTrace run_ms(const State& data, const RunConfig& cfg)
{
  detail::require_algorithm(cfg, Algorithm::ms);
  const std::size_t n = data.size();
  const std::size_t dim = data.dim();
  const double h = cfg.bandwidth;
  const std::uint64_t cap = std::max<std::uint64_t>(1, cfg.max_iterations / n);

  RunTrace trace{Algorithm::ms, {}, data, 0, StopReason::converged, {}, h, h};
  std::vector<double> y(dim);
  std::vector<double> next(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto origin = data.point(i);
    std::copy(origin.begin(), origin.end(), y.begin());
    bool done = false;
    for (std::uint64_t it = 1; it <= cap; ++it) {
      const ShiftStats stats = mean_shift_into(data, y, h, cfg.profile, next);
      ++trace.iterations_used;
      if (stats.neighbor_count == 0) {
        trace.isolated.push_back(i);
        done = true;
        break;
      }
      y.swap(next);
      if (cfg.trace_level != TraceLevel::off) {
        StepRecord rec;
        rec.step = trace.iterations_used;
        rec.index = i;
        rec.bandwidth = h;
        rec.shift_norm = stats.shift_norm;
        rec.weight_sum = stats.weight_sum;
        trace.steps.push_back(rec);
      }
      if (stats.shift_norm < cfg.convergence_threshold) {
        done = true;
        break;
      }
    }
    if (!done)
      trace.stop_reason = StopReason::max_iter;
    trace.final_state.set_point(i, y);
  }
  return trace;
}

inline RunTrace run_bms(const State& data, const RunConfig& cfg)
{
  detail::require_algorithm(cfg, Algorithm::bms);
  const std::size_t n = data.size();
  const std::size_t dim = data.dim();
  const double h = cfg.bandwidth;
  const std::uint64_t sweeps = std::max<std::uint64_t>(1, cfg.max_iterations / n);

  RunTrace trace{Algorithm::bms, {}, data, 0, StopReason::max_iter, {}, h, h};
  State next = data;
  std::vector<double> buffer(dim);
  for (std::uint64_t sweep = 1; sweep <= sweeps; ++sweep) {
    const State& current = trace.final_state;
    double largest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const ShiftStats stats = mean_shift_into(current, current.point(i), h, cfg.profile, buffer);
      next.set_point(i, buffer);
      largest = std::max(largest, stats.shift_norm);
    }
    std::swap(trace.final_state, next);
    trace.iterations_used = sweep;
    if (cfg.trace_level != TraceLevel::off) {
      StepRecord rec;
      rec.step = sweep;
      rec.bandwidth = h;
      rec.shift_norm = largest;
      if (detail::records_full(cfg, sweep)) {
        rec.objective_before = objective_L(next, h, cfg.profile);
        rec.objective_after = objective_L(trace.final_state, h, cfg.profile);
      }
      trace.steps.push_back(rec);
    }
    if (largest < cfg.convergence_threshold) {
      trace.stop_reason = StopReason::converged;
      break;
    }
  }
  return trace;
}

inline RunTrace run_sms(const State& data, const RunConfig& cfg)
{
  detail::require_algorithm(cfg, Algorithm::sms);
  return detail::run_single_point(data, cfg, [h = cfg.bandwidth] { return h; });
}

inline RunTrace run_dsms(const State& data, const RunConfig& cfg)
{
  detail::require_algorithm(cfg, Algorithm::dsms);
  const auto& p = cfg.schedule;
  BandwidthSchedule schedule(p.h_min, p.h_max, p.h_init, p.nu);
  RandomStream bandwidth_stream(derive_seed(cfg.seed, tag_of("bandwidth")));
  return detail::run_single_point(data, cfg, [&] { return schedule.draw(bandwidth_stream); });
}

inline RunTrace run(const State& data, const RunConfig& cfg)
{
  switch (cfg.algorithm) {
    case Algorithm::ms: return run_ms(data, cfg);
    case Algorithm::bms: return run_bms(data, cfg);
    case Algorithm::sms: return run_sms(data, cfg);
    case Algorithm::dsms: return run_dsms(data, cfg);
  }
  throw std::invalid_argument("unknown algorithm");
}

} // namespace mslab
