#include "mslab/core.hpp"
#include "mslab/random.hpp"

#include <gtest/gtest.h>

#include <vector>

using namespace mslab;

namespace {

State random_state(RandomStream& rng, std::size_t n, std::size_t d, double spread)
{
  std::vector<double> c(n * d);
  for (double& v : c)
    v = rng.uniform(-spread, spread);
  return State(d, c);
}

} // namespace

TEST(State, RejectsBadInput)
{
  EXPECT_THROW(State(0, {}), std::invalid_argument);
  EXPECT_THROW(State(2, {1.0, 2.0, 3.0}), std::invalid_argument);
  EXPECT_THROW(State(1, {}), std::invalid_argument);
  EXPECT_THROW(State(1, {std::nan("")}), std::invalid_argument);
}

TEST(Neighborhood, ContainsSelf)
{
  const auto s = State::from_rows({{0, 0}, {3, 3}});
  EXPECT_EQ(neighborhood(s, s.point(1), 0.1), (std::vector<std::size_t>{1}));
}

TEST(Neighborhood, StrictInequality)
{
  const auto s = State::from_rows({{0, 0}, {0.5, 0}});
  EXPECT_EQ(neighborhood(s, s.point(0), 0.5), (std::vector<std::size_t>{0}));
  EXPECT_EQ(neighborhood(s, s.point(1), 0.5), (std::vector<std::size_t>{1}));
}

TEST(Neighborhood, Example)
{
  const auto s = State::from_rows({{0, 0}, {0.5, 0}, {2, 0}});
  EXPECT_EQ(neighborhood(s, s.point(0), 1.0), (std::vector<std::size_t>{0, 1}));
  EXPECT_THROW(neighborhood(s, s.point(0), 0.0), std::invalid_argument);
}

TEST(MeanShift, SinglePointIsFixed)
{
  const auto s = State::from_rows({{0.3, -2}});
  const auto out = mean_shift_op(s, s.point(0), 0.6, Profile());
  EXPECT_EQ(out.new_point, (std::vector<double>{0.3, -2}));
  EXPECT_EQ(out.shift_norm, 0.0);
  EXPECT_EQ(out.neighbor_count, 1u);
}

TEST(MeanShift, TwoPointExample)
{
  const auto s = State::from_rows({{-0.1, 0}, {0.1, 0}});
  const auto out = mean_shift_op(s, s.point(0), 1.0, Profile(2));
  const double expected = (2 * -0.1 + 1.92 * 0.1) / 3.92;
  EXPECT_NEAR(out.new_point[0], expected, 1e-15);
  EXPECT_NEAR(out.new_point[0], -0.0020408, 1e-7);
  EXPECT_EQ(out.new_point[1], 0.0);
  EXPECT_DOUBLE_EQ(out.weight_sum, 3.92);
}

TEST(MeanShift, CoincidentPoints)
{
  const auto s = State::from_rows({{1, 2}, {1, 2}, {1, 2}});
  const auto out = mean_shift_op(s, s.point(0), 0.6, Profile());
  EXPECT_EQ(out.new_point, (std::vector<double>{1, 2}));
}

TEST(MeanShift, IsolatedQueryUnchanged)
{
  const auto s = State::from_rows({{0, 0}});
  const std::vector<double> x{5, 5};
  const auto out = mean_shift_op(s, x, 1.0, Profile());
  EXPECT_TRUE(out.isolated());
  EXPECT_EQ(out.new_point, x);
}

TEST(MeanShift, ResultInBoundingBoxAndWeightSumBound)
{
  RandomStream rng(5);
  const Profile p(3);
  for (int trial = 0; trial < 200; ++trial) {
    const State s = random_state(rng, 8, 2, 1.0);
    const auto box = BoundingBox::of(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto out = mean_shift_op(s, s.point(i), 0.8, p);
      EXPECT_TRUE(box.contains(out.new_point, 1e-12));
      EXPECT_GE(out.weight_sum, p.max_weight());
      if (out.neighbor_count == 1) {
        EXPECT_EQ(out.shift_norm, 0.0);
      }
    }
  }
}

TEST(Objective, Examples)
{
  const Profile p(2);
  EXPECT_EQ(objective_L(State::from_rows({{0, 0}}), 0.6, p), 1.0);
  EXPECT_EQ(objective_L(State::from_rows({{1, 1}, {1, 1}}), 0.6, p), 3.0);
  EXPECT_EQ(objective_L(State::from_rows({{0, 0}, {0.6, 0}}), 0.6, p), 2.0);
}

TEST(Gradient, Example)
{
  const auto s = State::from_rows({{-0.1, 0}, {0.1, 0}});
  const auto g = partial_gradient(s, 0, 1.0, Profile(2));
  EXPECT_NEAR(g[0], 0.768, 1e-14);
  EXPECT_EQ(g[1], 0.0);
}

TEST(Gradient, ZeroWhenFarApart)
{
  const auto s = State::from_rows({{0, 0}, {1, 0}, {0, 1}});
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_EQ(partial_gradient(s, i, 1.0, Profile()), (std::vector<double>{0, 0}));
  EXPECT_EQ(full_gradient_maxnorm(s, 1.0, Profile()), 0.0);
  EXPECT_EQ(full_gradient_maxnorm(State::from_rows({{4, 4}}), 1.0, Profile()), 0.0);
}

TEST(Gradient, MatchesFiniteDifferences)
{
  RandomStream rng(9);
  const double eps = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const State s = random_state(rng, 2 + trial % 6, d, 0.6);
    const Profile p(2 + trial % 3);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto g = partial_gradient(s, i, 0.7, p);
      for (std::size_t k = 0; k < d; ++k) {
        State plus = s, minus = s;
        std::vector<double> a(s.point(i).begin(), s.point(i).end()), b = a;
        a[k] += eps;
        b[k] -= eps;
        plus.set_point(i, a);
        minus.set_point(i, b);
        const double fd = (objective_L(plus, 0.7, p) - objective_L(minus, 0.7, p)) / (2 * eps);
        EXPECT_NEAR(g[k], fd, 1e-5 * std::max(1.0, std::abs(g[k])));
      }
    }
  }
}

TEST(Gradient, CollinearMaxNorm)
{
  const auto s = State::from_rows({{0}, {0.4}, {0.8}});
  const Profile p;
  double best = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    best = std::max(best, std::abs(partial_gradient(s, i, 1.0, p)[0]));
  EXPECT_EQ(full_gradient_maxnorm(s, 1.0, p), best);
  EXPECT_GT(best, 0.0);
}

TEST(Gradient, IdentityWithShiftVector)
{
  RandomStream rng(4);
  const Profile p;
  for (int trial = 0; trial < 100; ++trial) {
    const State s = random_state(rng, 6, 2, 0.5);
    const auto out = mean_shift_op(s, s.point(0), 0.6, p);
    const auto g = partial_gradient(s, 0, 0.6, p);
    for (std::size_t k = 0; k < 2; ++k) {
      const double implied = 2.0 / 0.36 * out.weight_sum * (out.new_point[k] - s.point(0)[k]);
      EXPECT_NEAR(g[k], implied, 1e-12 * std::max(1.0, std::abs(g[k])));
    }
  }
}

TEST(Critical, Examples)
{
  EXPECT_TRUE(is_critical(State::from_rows({{1, 1}, {1, 1}}), 0.6, 0.0));
  EXPECT_FALSE(is_critical(State::from_rows({{0, 0}, {0.3, 0}}), 0.6, 0.1));
  EXPECT_TRUE(is_critical(State::from_rows({{0, 0}, {0.6, 0}}), 0.6, 0.0));
}

TEST(AscentInequality, RandomStates)
{
  RandomStream rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const Profile p(2 + trial % 3);
    const State s = random_state(rng, 7, 2, 0.6);
    const double h = 0.3 + 0.5 * rng.uniform01();
    const std::size_t i = rng.index(s.size());
    const auto out = mean_shift_op(s, s.point(i), h, p);
    State next = s;
    next.set_point(i, out.new_point);
    const double gain = objective_L(next, h, p) - objective_L(s, h, p);
    EXPECT_GE(gain, 2 * p.max_weight() / (h * h) * out.shift_norm * out.shift_norm - 1e-9);
  }
}

TEST(GridIndex, AgreesWithScan)
{
  RandomStream rng(21);
  for (std::size_t d = 1; d <= 3; ++d) {
    const State s = random_state(rng, 200, d, 2.0);
    const GridIndex grid(s, 0.5);
    for (int q = 0; q < 100; ++q) {
      std::vector<double> x(d);
      for (double& v : x)
        v = rng.uniform(-2.5, 2.5);
      const double h = rng.uniform(0.05, 0.5);
      EXPECT_EQ(grid.neighborhood(x, h), neighborhood(s, x, h));
    }
    EXPECT_THROW(grid.neighborhood(s.point(0), 0.6), std::invalid_argument);
  }
}
