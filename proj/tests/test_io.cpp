#include "mslab/io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace mslab;

namespace {

std::string error_of(const std::string& text)
{
  std::istringstream in(text);
  try {
    read_points_csv(in);
  } catch (const FormatError& e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST(PointsCsv, RoundTrip)
{
  const auto s = State::from_rows({{0.1, -2.0 / 3.0}, {1e-300, 5}});
  std::ostringstream out;
  write_points_csv(out, s, {4, 7});
  std::istringstream in(out.str());
  const LabeledData back = read_points_csv(in);
  EXPECT_EQ(back.points, s);
  EXPECT_EQ(back.labels, (std::vector<int>{4, 7}));
}

TEST(PointsCsv, HeaderlessIsUnlabelled)
{
  std::istringstream in("1,2,3\n4,5,6\n");
  const LabeledData d = read_points_csv(in);
  EXPECT_EQ(d.points.dim(), 3u);
  EXPECT_FALSE(d.has_labels());
  std::istringstream again("1,2,3\n4,5,6\n");
  EXPECT_EQ(read_points_csv(again, LabelColumn::present).labels, (std::vector<int>{3, 6}));
}

TEST(PointsCsv, ErrorsNameTheRow)
{
  EXPECT_NE(error_of("x0,x1\n1,2\n3\n").find("row 3"), std::string::npos);
  EXPECT_NE(error_of("1,2\n1,abc\n").find("row 2"), std::string::npos);
  EXPECT_NE(error_of("x0,label\n1,2.5\n").find("row 2"), std::string::npos);
  EXPECT_NE(error_of("x0\n").find("no data"), std::string::npos);
  EXPECT_NE(error_of("1,2\n1,inf\n").find("row 2"), std::string::npos);
}

TEST(Fmt, SeventeenDigits)
{
  EXPECT_EQ(fmt17(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(fmt17(2.0 / 3.0)), 2.0 / 3.0);
}

TEST(KeyValues, ParsesCommentsAndSpaces)
{
  std::istringstream in("# comment\nalgo = dsms\n  seed=7  # trailing\n\n");
  const KeyValues kv = read_key_values(in);
  EXPECT_EQ(kv.at("algo"), "dsms");
  EXPECT_EQ(kv.at("seed"), "7");
  std::istringstream bad("algo dsms\n");
  EXPECT_THROW(read_key_values(bad), FormatError);
}

TEST(Metrics, Record)
{
  Clustering c;
  c.labels = {0, 0, 1};
  c.sizes = {2, 1};
  c.centers = {{0}, {1}};
  std::ostringstream out;
  write_metrics(out, c, {1, 2, 2});
  EXPECT_EQ(out.str(), "cluster_count = 2\nacp = 0.75\nalp = 0.75\nk = 0.75\n");
}

TEST(TraceJson, HasExpectedKeys)
{
  RunConfig cfg;
  cfg.algorithm = Algorithm::sms;
  cfg.trace_level = TraceLevel::full;
  const RunTrace t = run(State::from_rows({{0, 0}, {0.1, 0}}), cfg);
  std::ostringstream out;
  write_trace_json(out, t, cfg);
  const std::string s = out.str();
  for (const char* key : {"\"algorithm\":\"sms\"", "\"stop_reason\":\"converged\"", "\"L_before\"", "\"grad_norm\"",
                          "\"final_state\""})
    EXPECT_NE(s.find(key), std::string::npos) << key;
}
