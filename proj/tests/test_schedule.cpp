#include "mslab/schedule.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mslab;

TEST(Nu, PaperLog)
{
  const NuSpec s = NuSpec::inverse_log();
  EXPECT_DOUBLE_EQ(nu(s, 1), 1.0);
  EXPECT_NEAR(nu(s, 10), 1.0 / std::log10(11.0), 1e-15);
  EXPECT_NEAR(nu(s, 10), 0.960253, 1e-6);
  EXPECT_NEAR(nu(s, 1'000'000), 0.83048, 1e-5);
  EXPECT_NEAR(nu(s, 1'000'000), 1.0 / std::log10(16.0), 1e-15);
  EXPECT_THROW(nu(s, 0), std::domain_error);
}

TEST(Nu, ParseAndPrint)
{
  EXPECT_EQ(NuSpec::parse("paper-log").kind, NuSpec::Kind::inverse_log);
  const NuSpec c = NuSpec::parse("constant(0.3)");
  EXPECT_EQ(c.kind, NuSpec::Kind::constant);
  EXPECT_DOUBLE_EQ(nu(c, 12345), 0.3);
  EXPECT_FALSE(c.vanishes());
  EXPECT_NEAR(nu(NuSpec::parse("power(0.5)"), 4), 0.5, 1e-15);
  EXPECT_THROW(NuSpec::parse("linear"), std::invalid_argument);
  EXPECT_EQ(NuSpec::parse(c.str()).param, 0.3);
}

TEST(Delta, Endpoints)
{
  EXPECT_EQ(BandwidthSchedule(0.2, 1.6, 0.2).delta(), 0.0);
  EXPECT_EQ(BandwidthSchedule(0.2, 1.6, 1.6).delta(), 0.0);
}

TEST(Delta, OperatingPoint)
{
  EXPECT_DOUBLE_EQ(BandwidthSchedule(0.2, 1.6, 0.6).delta(), 0.859375);
}

TEST(Delta, RejectsOutOfRange)
{
  EXPECT_ANY_THROW(BandwidthSchedule(0.2, 1.6, 2.0));
}

TEST(Draw, DegenerateKeepsBandwidth)
{
  BandwidthSchedule s(0.6, 0.6, 0.6);
  RandomStream rng(1);
  for (int i = 0; i < 100; ++i)
    EXPECT_EQ(s.draw(rng), 0.6);
  EXPECT_EQ(s.step(), 101u);
}

TEST(Draw, FirstStepRange)
{
  RandomStream rng(2);
  const double lo = 0.6 / std::sqrt(1.859375);
  for (int i = 0; i < 10000; ++i) {
    BandwidthSchedule s(0.2, 1.6, 0.6);
    const double h = s.draw(rng);
    ASSERT_GE(h, lo - 1e-15);
    ASSERT_LE(h, 1.6);
  }
  EXPECT_NEAR(lo, 0.440015, 1e-6);
}

TEST(Draw, MultiplierMeanIsOne)
{
  RandomStream rng(3);
  const double delta = 0.859375;
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    BandwidthSchedule s(0.2, 1.6, 0.6);
    const double h = s.draw(rng);
    sum += (0.6 / h) * (0.6 / h);
  }
  const double sigma = delta / std::sqrt(3.0);
  EXPECT_NEAR(sum / n, 1.0, 3 * sigma / std::sqrt(double(n)));
}

TEST(Draw, ConfinedToRange)
{
  RandomStream rng(4);
  BandwidthSchedule s(0.2, 1.6, 0.6, NuSpec::constant(1.0));
  for (int i = 0; i < 100000; ++i) {
    const double h = s.draw(rng);
    ASSERT_GE(h, 0.2);
    ASSERT_LE(h, 1.6);
  }
}

TEST(Draw, IncrementsVanish)
{
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomStream rng(seed);
    BandwidthSchedule s(0.2, 1.6, 0.6);
    double early = 0.0, late = 0.0, prev = s.current();
    for (int k = 0; k < 1'000'000; ++k) {
      const double h = s.draw(rng);
      const double step = std::abs(h - prev);
      if (k < 100'000)
        early = std::max(early, step);
      else if (k >= 900'000)
        late = std::max(late, step);
      prev = h;
    }
    EXPECT_LT(late, early) << seed;
  }
}
