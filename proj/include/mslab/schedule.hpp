#pragma once

// Random bandwidth schedule for doubly stochastic mean-shift.
//
// At step k (k >= 1) with current bandwidth h_k:
//   delta   = min{ nu_k, (h_k/h_min)^2 - 1, 1 - (h_k/h_max)^2 }
//   a       ~ U[1 - delta, 1 + delta]
//   h_{k+1} = h_k / sqrt(a)
// The two range terms keep h_{k+1} inside [h_min, h_max]; nu_k -> 0 makes the
// increments vanish.

#include "mslab/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mslab {

//! Named nu-sequence: "paper-log", "constant(c)" or "power(p)".
struct NuSpec
{
  enum class Kind
  {
    inverse_log,
    constant,
    power
  };

  Kind kind = Kind::inverse_log;
  double param = 0.0;

  static NuSpec inverse_log() { return {}; }
  static NuSpec constant(double c) { return {Kind::constant, c}; }
  static NuSpec power(double p) { return {Kind::power, p}; }

  static NuSpec parse(std::string_view text)
  {
    if (text == "paper-log")
      return inverse_log();
    auto argument = [&](std::string_view prefix) -> double {
      const std::string body(text.substr(prefix.size(), text.size() - prefix.size() - 1));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(body, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != body.size() || body.empty())
        throw std::invalid_argument("bad nu argument in '" + std::string(text) + "'");
      return v;
    };
    auto wraps = [&](std::string_view prefix) {
      return text.size() > prefix.size() + 1 && text.substr(0, prefix.size()) == prefix &&
             text.back() == ')';
    };
    NuSpec spec;
    if (wraps("constant("))
      spec = constant(argument("constant("));
    else if (wraps("power("))
      spec = power(argument("power("));
    else
      throw std::invalid_argument("unknown nu sequence '" + std::string(text) +
                                  "' (expected paper-log, constant(c) or power(p))");
    spec.validate();
    return spec;
  }

  void validate() const
  {
    if (kind != Kind::inverse_log && !(param > 0.0))
      throw std::invalid_argument("nu parameter must be positive");
  }

  /// False for constant sequences, which do not tend to zero.
  bool vanishes() const noexcept { return kind != Kind::constant; }

  std::string str() const
  {
    char buf[64];
    switch (kind) {
      case Kind::inverse_log: return "paper-log";
      case Kind::constant: std::snprintf(buf, sizeof buf, "constant(%.17g)", param); return buf;
      case Kind::power: std::snprintf(buf, sizeof buf, "power(%.17g)", param); return buf;
    }
    return {};
  }

  friend bool operator==(const NuSpec&, const NuSpec&) = default;
};

inline double nu(const NuSpec& spec, std::uint64_t k)
{
  if (k == 0)
    throw std::domain_error("nu sequence is indexed from k = 1");
  switch (spec.kind) {
    case NuSpec::Kind::inverse_log:
      return 1.0 / std::log10(10.0 + std::log10(static_cast<double>(k)));
    case NuSpec::Kind::constant:
      return spec.param;
    case NuSpec::Kind::power:
      return std::pow(static_cast<double>(k), -spec.param);
  }
  return 0.0;
}

class BandwidthSchedule
{
public:
  BandwidthSchedule(double h_min, double h_max, double h_init, NuSpec nu_spec = {})
    : h_min_(h_min), h_max_(h_max), h_(h_init), nu_(nu_spec)
  {
    if (!(h_min > 0.0) || !(h_min <= h_max) || !std::isfinite(h_max))
      throw std::invalid_argument("bandwidth range must satisfy 0 < h_min <= h_max");
    if (h_init < h_min || h_init > h_max)
      throw std::invalid_argument("initial bandwidth must lie in [h_min, h_max]");
    nu_.validate();
  }

  double h_min() const noexcept { return h_min_; }
  double h_max() const noexcept { return h_max_; }
  double current() const noexcept { return h_; }
  std::uint64_t step() const noexcept { return k_; }
  const NuSpec& nu_spec() const noexcept { return nu_; }

  /// Half-width of the multiplier interval at the current step.
  double delta() const
  {
    if (h_ < h_min_ || h_ > h_max_)
      throw std::logic_error("bandwidth left [h_min, h_max]");
    const double lower = (h_ / h_min_) * (h_ / h_min_) - 1.0;
    const double upper = 1.0 - (h_ / h_max_) * (h_ / h_max_);
    return std::max(0.0, std::min({nu(nu_, k_), lower, upper}));
  }

  /// Draws h_{k+1}, makes it current and advances k.
  double draw(RandomStream& rng)
  {
    const double d = delta();
    const double a = rng.uniform(1.0 - d, 1.0 + d);
    // Rounding in h / sqrt(a) can land one ulp outside the range at the edges.
    h_ = std::clamp(h_ / std::sqrt(a), h_min_, h_max_);
    ++k_;
    return h_;
  }

private:
  double h_min_;
  double h_max_;
  double h_;
  std::uint64_t k_ = 1;
  NuSpec nu_;
};

} // namespace mslab
