#include "mslab/random.hpp"

#include <gtest/gtest.h>

#include <vector>

using namespace mslab;

TEST(Random, SameSeedSameSequence)
{
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i)
    EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Random, DerivedSeedsDiffer)
{
  EXPECT_NE(derive_seed(1, tag_of("index")), derive_seed(1, tag_of("bandwidth")));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(9, 3), derive_seed(9, 3));
}

TEST(Random, Uniform01InRange)
{
  RandomStream r(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Random, DegenerateUniformReturnsEndpoint)
{
  RandomStream r(7);
  EXPECT_EQ(r.uniform(1.0, 1.0), 1.0);
}

TEST(Random, IndexCoversRangeUniformly)
{
  RandomStream r(3);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 50000; ++i)
    ++hits[r.index(5)];
  for (int h : hits)
    EXPECT_NEAR(h, 10000, 400);
}

TEST(Random, NormalMoments)
{
  RandomStream r(11);
  double s = 0.0, s2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Random, ChecksumSeesEveryBit)
{
  std::vector<double> a{1.0, 2.0};
  std::vector<double> b{1.0, std::nextafter(2.0, 3.0)};
  EXPECT_NE(checksum(a), checksum(b));
  EXPECT_EQ(checksum(a), checksum(std::vector<double>{1.0, 2.0}));
}
