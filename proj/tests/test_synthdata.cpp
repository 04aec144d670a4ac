#include "mslab/synthdata.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mslab;

TEST(Synth, PaperSpec)
{
  const GmmSpec s = three_cluster_spec(10);
  ASSERT_EQ(s.components.size(), 3u);
  EXPECT_EQ(s.total(), 30u);
  EXPECT_EQ(three_cluster_spec(200).total(), 600u);
  EXPECT_EQ(s.components[0].mean, (std::vector<double>{1, 1}));
  EXPECT_EQ(s.components[1].mean, (std::vector<double>{-1, -1}));
  EXPECT_EQ(s.components[2].mean, (std::vector<double>{1, -1}));
  EXPECT_EQ(s.components[0].variance, 0.65);
  EXPECT_NEAR(three_cluster_spec(10, SpreadReading::stddev).components[0].variance, 0.65 * 0.65, 1e-15);
}

TEST(Synth, LabelCounts)
{
  const auto d = generate(GmmSpec{{{{0, 0}, 1.0, 10}, {{5, 5}, 1.0, 10}, {{9, 0}, 1.0, 10}}}, 1);
  EXPECT_EQ(d.points.size(), 30u);
  for (int label = 0; label < 3; ++label)
    EXPECT_EQ(std::count(d.labels.begin(), d.labels.end(), label), 10);
}

TEST(Synth, DegenerateVariance)
{
  const auto d = generate(GmmSpec{{{{2, -3}, 1e-20, 20}}}, 1);
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    EXPECT_NEAR(d.points.point(i)[0], 2.0, 1e-8);
    EXPECT_NEAR(d.points.point(i)[1], -3.0, 1e-8);
  }
}

TEST(Synth, SampleMeansNearTruth)
{
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto d = generate(three_cluster_spec(200), seed);
    const auto spec = three_cluster_spec(200);
    for (int c = 0; c < 3; ++c) {
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < d.points.size(); ++i)
        if (d.labels[i] == c) {
          mx += d.points.point(i)[0] / 200;
          my += d.points.point(i)[1] / 200;
        }
      const double bound = 4 * std::sqrt(0.65 / 200);
      EXPECT_NEAR(mx, spec.components[c].mean[0], bound);
      EXPECT_NEAR(my, spec.components[c].mean[1], bound);
    }
  }
}

TEST(Synth, Deterministic)
{
  EXPECT_EQ(generate(three_cluster_spec(50), 9).points, generate(three_cluster_spec(50), 9).points);
  EXPECT_FALSE(generate(three_cluster_spec(50), 9).points == generate(three_cluster_spec(50), 10).points);
}

TEST(Synth, InvalidSpec)
{
  EXPECT_THROW(generate(GmmSpec{{{{0, 0}, -1.0, 5}}}, 0), std::invalid_argument);
  EXPECT_THROW(generate(GmmSpec{{{{0, 0}, 1.0, 0}}}, 0), std::invalid_argument);
  EXPECT_THROW(generate(GmmSpec{{{{0, 0}, 1.0, 2}, {{0}, 1.0, 2}}}, 0), std::invalid_argument);
}

TEST(Synth, CircleSpec)
{
  const GmmSpec s = circle_spec(4, 100);
  ASSERT_EQ(s.components.size(), 4u);
  for (const auto& c : s.components)
    EXPECT_NEAR(std::hypot(c.mean[0], c.mean[1]), 2.0, 1e-12);
}
