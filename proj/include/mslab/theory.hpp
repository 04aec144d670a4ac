#pragma once

// Executable checks of the convergence guarantees.
//
// Per-step inequalities, with h = h_{k+1} and x' the updated point:
//   ascent          L_h(X^(k+1)) - L_h(X^(k)) >= (2|k'(0)|/h^2) |x' - x|^2
//   gradient bound  |grad_{i_k} L_h(X^(k))|   <= (2n|k'(0)|/h^2) |x' - x|
// Statistical and terminal checks:
//   submartingale   E[L_{h'}(X) | h] >= L_h(X) for one schedule draw h -> h'
//   separation      after convergence every pair is closer than 0.05 h_min or
//                   farther than 0.95 h_min
//   gradient decay  max gradient over the last 1% of steps <= over the first 1%
// Plus the finite-difference gradient check and the critical-point
// characterisation (zero gradient <=> pairs coincide or are >= h apart).

#include "mslab/core.hpp"
#include "mslab/engine.hpp"
#include "mslab/random.hpp"
#include "mslab/schedule.hpp"
#include "mslab/stats.hpp"
#include "mslab/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace mslab {

struct CheckResult
{
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::string detail;
};

namespace detail {

inline std::string describe_step(std::size_t run, const StepRecord& r)
{
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "run %zu step %llu: i=%zu h=%.17g shift=%.17g weight_sum=%.17g L_before=%.17g "
                "L_after=%.17g grad=%.17g",
                run, static_cast<unsigned long long>(r.step), r.index, r.bandwidth, r.shift_norm,
                r.weight_sum, r.objective_before.value_or(NAN), r.objective_after.value_or(NAN),
                r.gradient_norm.value_or(NAN));
  return buf;
}

inline void fail_once(CheckResult& c, std::string detail)
{
  if (c.passed)
    c.detail = std::move(detail);
  c.passed = false;
}

} // namespace detail

/// Ascent inequality on every step that carries objective values.
inline CheckResult check_ascent(const std::vector<RunTrace>& traces, const Profile& p, double tol = 1e-9)
{
  CheckResult c{"ascent", true, 0, {}};
  for (std::size_t t = 0; t < traces.size(); ++t)
    for (const StepRecord& r : traces[t].steps) {
      if (!r.objective_before || !r.objective_after)
        continue;
      ++c.checked;
      const double gap = 2.0 * p.max_weight() / (r.bandwidth * r.bandwidth) * r.shift_norm * r.shift_norm;
      if (*r.objective_after - *r.objective_before < gap - tol)
        detail::fail_once(c, detail::describe_step(t, r));
    }
  return c;
}

/// Gradient bound on every step that carries a gradient norm.
inline CheckResult check_gradient_bound(const std::vector<RunTrace>& traces, const Profile& p, double tol = 1e-9)
{
  CheckResult c{"gradient_bound", true, 0, {}};
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const double n = static_cast<double>(traces[t].final_state.size());
    for (const StepRecord& r : traces[t].steps) {
      if (!r.gradient_norm)
        continue;
      ++c.checked;
      const double bound = 2.0 * n * p.max_weight() / (r.bandwidth * r.bandwidth) * r.shift_norm;
      if (*r.gradient_norm > bound + tol)
        detail::fail_once(c, detail::describe_step(t, r));
    }
  }
  return c;
}

/// The recorded objective never decreases along a fixed-bandwidth run.
inline CheckResult check_monotone_objective(const std::vector<RunTrace>& traces, double tol = 1e-9)
{
  CheckResult c{"monotone_objective", true, 0, {}};
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const auto& steps = traces[t].steps;
    for (std::size_t s = 1; s < steps.size(); ++s) {
      if (!steps[s].objective_after || !steps[s - 1].objective_after)
        continue;
      ++c.checked;
      if (*steps[s].objective_after < *steps[s - 1].objective_after - tol)
        detail::fail_once(c, detail::describe_step(t, steps[s]));
    }
  }
  return c;
}

/// Converged runs end with every pair closer than frac*h_min or farther than (1-frac)*h_min.
inline CheckResult check_terminal_separation(const std::vector<RunTrace>& traces, double h_min, double frac = 0.05)
{
  CheckResult c{"terminal_separation", true, 0, {}};
  const double near = frac * h_min;
  const double far = (1.0 - frac) * h_min;
  for (std::size_t t = 0; t < traces.size(); ++t) {
    if (traces[t].stop_reason != StopReason::converged)
      continue;
    ++c.checked;
    const State& s = traces[t].final_state;
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        const double d = distance(s.point(i), s.point(j));
        if (d >= near && d <= far) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "run %zu: |x_%zu - x_%zu| = %.17g inside [%.17g, %.17g]", t, i, j,
                        d, near, far);
          detail::fail_once(c, buf);
        }
      }
  }
  if (c.checked == 0)
    detail::fail_once(c, "no converged run to check");
  return c;
}

/// Largest gradient norm over the last 1% of steps <= largest over the first 1%.
inline CheckResult check_gradient_decay(const std::vector<RunTrace>& traces)
{
  CheckResult c{"gradient_decay", true, 0, {}};
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const auto& steps = traces[t].steps;
    if (steps.empty())
      continue;
    ++c.checked;
    const std::size_t window = std::max<std::size_t>(1, steps.size() / 100);
    double head = 0.0;
    double tail = 0.0;
    for (std::size_t s = 0; s < window; ++s) {
      head = std::max(head, steps[s].implied_gradient_norm());
      tail = std::max(tail, steps[steps.size() - 1 - s].implied_gradient_norm());
    }
    if (tail > head) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "run %zu: last-1%% max %.17g > first-1%% max %.17g", t, tail, head);
      detail::fail_once(c, buf);
    }
  }
  return c;
}

inline CheckResult check_bandwidth_confinement(const std::vector<RunTrace>& traces, double h_min, double h_max)
{
  CheckResult c{"bandwidth_confinement", true, 0, {}};
  for (std::size_t t = 0; t < traces.size(); ++t)
    for (const StepRecord& r : traces[t].steps) {
      ++c.checked;
      if (r.bandwidth < h_min || r.bandwidth > h_max)
        detail::fail_once(c, detail::describe_step(t, r));
    }
  return c;
}

namespace detail {

inline State random_state(RandomStream& rng, std::size_t n, std::size_t dim, double spread)
{
  std::vector<double> coords(n * dim);
  for (double& x : coords)
    x = rng.uniform(-spread, spread);
  return State(dim, std::move(coords));
}

} // namespace detail

/// partial_gradient against central differences of objective_L (step 1e-6).
inline CheckResult check_gradient_fd(std::uint64_t seed, std::size_t count = 100, double rel_tol = 1e-5)
{
  CheckResult c{"gradient_finite_difference", true, 0, {}};
  RandomStream rng(seed);
  const double eps = 1e-6;
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t n = 2 + rng.index(9);
    const std::size_t dim = 1 + rng.index(3);
    const double h = rng.uniform(0.5, 2.0);
    const Profile profile(2 + static_cast<int>(rng.index(3)));
    const State state = detail::random_state(rng, n, dim, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto grad = partial_gradient(state, i, h, profile);
      double diff2 = 0.0;
      double norm2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        std::vector<double> coords(state.coords().begin(), state.coords().end());
        coords[i * dim + k] += eps;
        const double up = objective_L(State(dim, coords), h, profile);
        coords[i * dim + k] -= 2.0 * eps;
        const double down = objective_L(State(dim, coords), h, profile);
        const double fd = (up - down) / (2.0 * eps);
        diff2 += (fd - grad[k]) * (fd - grad[k]);
        norm2 += grad[k] * grad[k];
      }
      ++c.checked;
      const double rel = std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-2);
      if (rel > rel_tol) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "state %zu point %zu: relative error %.3g (n=%zu d=%zu h=%.6g)", s, i,
                      rel, n, dim, h);
        detail::fail_once(c, buf);
      }
    }
  }
  return c;
}

/// Random small state that is critical by construction, optionally with one
/// point nudged off its site.
inline State random_critical_state(RandomStream& rng, std::size_t n, std::size_t dim, double h)
{
  std::vector<std::vector<double>> sites;
  const std::size_t wanted = 1 + rng.index(n);
  for (std::size_t attempt = 0; sites.size() < wanted && attempt < 200; ++attempt) {
    std::vector<double> p(dim);
    for (double& x : p)
      x = rng.uniform(-2.0 * h, 2.0 * h);
    const bool clear = std::all_of(sites.begin(), sites.end(),
                                   [&](const auto& q) { return distance(p, q) > 1.0001 * h; });
    if (clear)
      sites.push_back(std::move(p));
  }
  std::vector<double> coords;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& site = sites[i < sites.size() ? i : rng.index(sites.size())];
    coords.insert(coords.end(), site.begin(), site.end());
  }
  return State(dim, std::move(coords));
}

/// is_critical(X, h, 0) agrees with full_gradient_maxnorm(X, h) <= 1e-12.
inline CheckResult check_critical_characterization(std::uint64_t seed, std::size_t count = 1000)
{
  CheckResult c{"critical_points", true, 0, {}};
  RandomStream rng(seed);
  std::size_t critical = 0;
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t n = 1 + rng.index(5);
    const std::size_t dim = 1 + rng.index(3);
    const double h = rng.uniform(0.5, 1.5);
    const Profile profile(2 + static_cast<int>(rng.index(3)));
    State state = s % 3 == 0 ? detail::random_state(rng, n, dim, h) : random_critical_state(rng, n, dim, h);
    if (s % 3 == 2) {
      std::vector<double> coords(state.coords().begin(), state.coords().end());
      coords[rng.index(coords.size())] += rng.uniform(1e-3, 0.5) * h;
      state = State(dim, std::move(coords));
    }
    const bool geometric = is_critical(state, h, 0.0);
    const bool stationary = full_gradient_maxnorm(state, h, profile) <= 1e-12;
    critical += geometric ? 1 : 0;
    ++c.checked;
    if (geometric != stationary) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "state %zu: is_critical=%d but zero-gradient=%d (n=%zu d=%zu)", s,
                    int(geometric), int(stationary), n, dim);
      detail::fail_once(c, buf);
    }
  }
  if (c.passed)
    c.detail = std::to_string(critical) + " critical, " + std::to_string(count - critical) + " non-critical";
  return c;
}

/// Monte-Carlo E[L_{h'}(X)] over schedule draws from h, against L_h(X) - 3 SE.
inline CheckResult check_submartingale(std::uint64_t seed,
                                       const ScheduleParams& params,
                                       std::size_t states = 5,
                                       std::size_t draws = 10'000,
                                       const Profile& profile = Profile{})
{
  CheckResult c{"submartingale", true, 0, {}};
  RandomStream rng(seed);
  for (std::size_t s = 0; s < states; ++s) {
    const State state = detail::random_state(rng, 20, 2, 1.0);
    const double base = objective_L(state, params.h_init, profile);
    std::vector<double> values(draws);
    for (double& v : values) {
      BandwidthSchedule schedule(params.h_min, params.h_max, params.h_init, params.nu);
      v = objective_L(state, schedule.draw(rng), profile);
    }
    const double mean = sample_mean(values);
    const double se = sample_stddev(values) / std::sqrt(static_cast<double>(draws));
    ++c.checked;
    char buf[160];
    std::snprintf(buf, sizeof buf, "state %zu: E[L_h'] = %.10g, L_h = %.10g, SE = %.3g", s, mean, base, se);
    if (mean < base - 3.0 * se)
      detail::fail_once(c, buf);
    else if (c.passed)
      c.detail = buf;
  }
  return c;
}

struct TheorySuiteOptions
{
  std::size_t seeds = 10;
  std::size_t n_per_cluster = 50;
  std::uint64_t master_seed = 0;
  Profile profile{};
  ScheduleParams schedule{};
  double bandwidth = 0.6;
  std::uint64_t max_iterations = 10'000'000;
  double convergence_threshold = 1e-6;
  std::uint64_t checked_steps = 10'000;
  bool shift_against_origin = false;
};

struct TheorySuiteReport
{
  std::vector<CheckResult> checks;
  std::vector<RunTrace> dsms_runs;

  bool passed() const
  {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

/// Seeded DSMS (and SMS) runs on the three-component mixture, then every check.
inline TheorySuiteReport run_theory_suite(const TheorySuiteOptions& o)
{
  TheorySuiteReport report;
  std::vector<RunTrace> sms_runs;
  for (std::size_t s = 0; s < o.seeds; ++s) {
    const std::uint64_t seed = derive_seed(o.master_seed, s);
    const LabeledData data = generate(three_cluster_spec(o.n_per_cluster), seed);
    RunConfig cfg;
    cfg.profile = o.profile;
    cfg.bandwidth = o.bandwidth;
    cfg.schedule = o.schedule;
    cfg.max_iterations = o.max_iterations;
    cfg.convergence_threshold = o.convergence_threshold;
    cfg.seed = derive_seed(seed, tag_of("run"));
    cfg.trace_level = TraceLevel::full;
    cfg.full_trace_steps = o.checked_steps;
    cfg.shift_against_origin = o.shift_against_origin;
    cfg.algorithm = Algorithm::dsms;
    report.dsms_runs.push_back(run(data.points, cfg));
    if (s < 3) {
      cfg.algorithm = Algorithm::sms;
      sms_runs.push_back(run(data.points, cfg));
    }
  }
  const auto& runs = report.dsms_runs;
  auto& checks = report.checks;
  checks.push_back(check_ascent(runs, o.profile));
  checks.push_back(check_gradient_bound(runs, o.profile));
  auto sms_monotone = check_monotone_objective(sms_runs);
  sms_monotone.name = "sms_monotone_objective";
  checks.push_back(sms_monotone);
  checks.push_back(check_gradient_fd(derive_seed(o.master_seed, tag_of("fd"))));
  checks.push_back(check_critical_characterization(derive_seed(o.master_seed, tag_of("critical"))));
  checks.push_back(check_submartingale(derive_seed(o.master_seed, tag_of("submartingale")), o.schedule, 5,
                                       10'000, o.profile));
  checks.push_back(check_terminal_separation(runs, o.schedule.h_min));
  checks.push_back(check_gradient_decay(runs));
  checks.push_back(check_bandwidth_confinement(runs, o.schedule.h_min, o.schedule.h_max));
  return report;
}

} // namespace mslab
