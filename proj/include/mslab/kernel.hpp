#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mslab {

//! Truncated polynomial profile k(t) = (1 - t)_+^alpha.
//!
//! The derived radial kernel is K(u) = k(|u|^2) and the mean-shift weight is
//! G(u) = -k'(|u|^2). Support is the open unit ball: k, k' and G are exactly
//! zero once |u|^2 >= 1, so "nonzero weight" and "strict neighbour" coincide.
class Profile
{
public:
  explicit Profile(int alpha = 2) : alpha_(alpha)
  {
    if (alpha < 2 || alpha > 4)
      throw std::invalid_argument("profile exponent must be 2, 3 or 4, got " +
                                  std::to_string(alpha));
  }

  /// "biweight" (alpha=2), "triweight" (3) or "quadweight" (4).
  static Profile from_name(std::string_view name)
  {
    if (name == "biweight")
      return Profile(2);
    if (name == "triweight")
      return Profile(3);
    if (name == "quadweight")
      return Profile(4);
    throw std::invalid_argument("unknown kernel '" + std::string(name) +
                                "' (expected biweight, triweight or quadweight)");
  }

  int alpha() const noexcept { return alpha_; }

  std::string_view name() const noexcept
  {
    switch (alpha_) {
      case 2: return "biweight";
      case 3: return "triweight";
      default: return "quadweight";
    }
  }

  double value(double t) const
  {
    check_domain(t);
    return t < 1.0 ? power(1.0 - t, alpha_) : 0.0;
  }

  double derivative(double t) const
  {
    check_domain(t);
    return t < 1.0 ? -alpha_ * power(1.0 - t, alpha_ - 1) : 0.0;
  }

  /// |k'(0)|, the largest value the weight function takes.
  double max_weight() const noexcept { return static_cast<double>(alpha_); }

  /// K(u) = k(|u|^2).
  double kernel(std::span<const double> u) const { return value(squared_norm(u)); }

  /// G(u) = -k'(|u|^2).
  double weight(std::span<const double> u) const { return -derivative(squared_norm(u)); }

  // Hot-path variants taking t = |u|^2 >= 0 directly, without the domain check.
  double value_sq(double t) const noexcept { return t < 1.0 ? power(1.0 - t, alpha_) : 0.0; }
  double weight_sq(double t) const noexcept
  {
    return t < 1.0 ? alpha_ * power(1.0 - t, alpha_ - 1) : 0.0;
  }

  friend bool operator==(const Profile&, const Profile&) = default;

private:
  static double power(double base, int e) noexcept
  {
    double r = 1.0;
    for (int i = 0; i < e; ++i)
      r *= base;
    return r;
  }

  static double squared_norm(std::span<const double> u) noexcept
  {
    double s = 0.0;
    for (double c : u)
      s += c * c;
    return s;
  }

  static void check_domain(double t)
  {
    if (!(t >= 0.0))
      throw std::domain_error("profile argument must be non-negative");
  }

  int alpha_;
};

} // namespace mslab
