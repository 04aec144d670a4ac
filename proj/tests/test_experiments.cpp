#include "mslab/experiments.hpp"
#include "mslab/io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace mslab;

namespace {

ExperimentSettings small_settings()
{
  ExperimentSettings s;
  s.reps = 4;
  s.master_seed = 99;
  return s;
}

std::string csv(const SweepResult& r)
{
  std::ostringstream out;
  write_sweep_csv(out, r);
  return out.str();
}

} // namespace

TEST(Sweep, RowsAndInvariants)
{
  const SweepResult r = sweep_sparse(small_settings(), {10, 20});
  EXPECT_EQ(r.rows.size(), 2u * 4u * 4u);
  for (const SweepRow& row : r.rows) {
    EXPECT_LE(row.ci.lo, row.ci.mean);
    EXPECT_LE(row.ci.mean, row.ci.hi);
    EXPECT_EQ(row.reps, 4u);
  }
  for (const auto& [key, values] : r.samples) {
    const auto& metric = std::get<2>(key);
    for (double v : values) {
      if (metric == "cluster_count")
        EXPECT_GE(v, 1.0);
      else {
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(Sweep, SharedDataWithinRepetition)
{
  const SweepResult r = sweep_sparse(small_settings(), {10});
  const auto& ms = r.data_checksums.at({10.0, "ms"});
  ASSERT_EQ(ms.size(), 4u);
  for (const char* algo : {"bms", "sms", "dsms"})
    EXPECT_EQ(r.data_checksums.at({10.0, algo}), ms) << algo;
  EXPECT_NE(ms[0], ms[1]);
}

TEST(Sweep, DeterministicAcrossWorkerCounts)
{
  ExperimentSettings one = small_settings();
  ExperimentSettings many = small_settings();
  many.workers = 4;
  EXPECT_EQ(csv(sweep_sparse(one, {10, 15})), csv(sweep_sparse(many, {10, 15})));
}

TEST(Sweep, AddingGridPointsKeepsCells)
{
  const auto a = sweep_sparse(small_settings(), {10});
  const auto b = sweep_sparse(small_settings(), {10, 30});
  EXPECT_EQ(a.samples.at({10.0, "dsms", "k"}), b.samples.at({10.0, "dsms", "k"}));
}

TEST(Range, WidthZeroIsSmsBaseline)
{
  ExperimentSettings s = small_settings();
  const SweepResult r = sweep_bandwidth_range(s, {0.0, 1.4});
  EXPECT_EQ(r.samples.at({0.0, "dsms", "k"}), r.samples.at({0.0, "sms", "k"}));
}

TEST(Range, Centering)
{
  const ScheduleParams ref{};
  const auto op = range_for_width(1.4, ref, 0.1);
  EXPECT_NEAR(op.h_min, 0.2, 1e-15);
  EXPECT_NEAR(op.h_max, 1.6, 1e-15);
  EXPECT_FALSE(op.clamped);
  const auto wide = range_for_width(3.0, ref, 0.1);
  EXPECT_TRUE(wide.clamped);
  EXPECT_EQ(wide.h_min, 0.1);
  EXPECT_NEAR(wide.h_max, 3.1, 1e-15);
  const auto zero = range_for_width(0.0, ref, 0.1);
  EXPECT_EQ(zero.h_min, 0.6);
  EXPECT_EQ(zero.h_max, 0.6);
}

TEST(OtherSweeps, Shapes)
{
  ExperimentSettings s = small_settings();
  s.reps = 2;
  const auto imb = sweep_imbalance(s, {1.0});
  const auto cnt = sweep_cluster_count(s, {3});
  EXPECT_EQ(imb.rows.size(), 2u * 4u);
  EXPECT_EQ(cnt.rows.size(), 2u * 4u);
}

TEST(Sweep, RejectsSingleRep)
{
  ExperimentSettings s = small_settings();
  s.reps = 1;
  EXPECT_THROW(sweep_sparse(s, {10}), std::invalid_argument);
}
