#include "mslab/theory.hpp"

#include <gtest/gtest.h>

using namespace mslab;

TEST(Theory, GradientFiniteDifference)
{
  EXPECT_TRUE(check_gradient_fd(1).passed);
}

TEST(Theory, CriticalCharacterization)
{
  const auto c = check_critical_characterization(2);
  EXPECT_TRUE(c.passed) << c.detail;
  EXPECT_EQ(c.checked, 1000u);
}

TEST(Theory, Submartingale)
{
  EXPECT_TRUE(check_submartingale(3, ScheduleParams{}, 5, 10'000, Profile()).passed);
}

TEST(Theory, SuitePassesWithConstantNu)
{
  TheorySuiteOptions o;
  o.seeds = 2;
  o.n_per_cluster = 20;
  o.schedule.nu = NuSpec::constant(1.0);
  const auto report = run_theory_suite(o);
  for (const auto& c : report.checks)
    if (c.name == "ascent" || c.name == "gradient_bound") {
      EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
    }
}

TEST(Theory, MutationIsDetected)
{
  TheorySuiteOptions o;
  o.seeds = 2;
  o.n_per_cluster = 20;
  o.shift_against_origin = true;
  const auto report = run_theory_suite(o);
  EXPECT_FALSE(report.passed());
  for (const auto& c : report.checks)
    if (c.name == "ascent") {
      EXPECT_FALSE(c.passed);
    }
}
